#include "causaltwin/tdmi.hpp"

#include <algorithm>

#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"
#include "mi_internal.hpp"

namespace causaltwin {

namespace {

bool looks_binary(const std::vector<double>& xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

struct AlignedPair {
  std::vector<double> x;  // x(t - lag)
  std::vector<double> y;  // y(t)
};

AlignedPair align(const std::vector<double>& x, const std::vector<double>& y, int lag) {
  require(lag >= 0, Errc::InvalidArgument, "lag must be nonnegative");
  require(x.size() == y.size(), Errc::InvalidArgument, "series lengths differ");
  require(x.size() > static_cast<std::size_t>(lag), Errc::SeriesTooShort,
          "series shorter than the requested lag");
  AlignedPair out;
  const std::size_t n = x.size() - static_cast<std::size_t>(lag);
  out.x.assign(x.begin(), x.begin() + n);
  out.y.assign(y.begin() + lag, y.end());
  return out;
}

}  // namespace

TdmiResult tdmi(const std::vector<double>& x, const std::vector<double>& y, int lag, int bins) {
  require(bins >= 2, Errc::InvalidArgument, "need at least two bins");
  AlignedPair pair = align(x, y, lag);
  require(pair.x.size() > static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins),
          Errc::SeriesTooShort, "need more pairs than bins^2");

  TdmiResult result;
  result.pairs = pair.x.size();
  const auto bx = detail::bin_series(pair.x, bins, looks_binary(pair.x));
  const auto by = detail::bin_series(pair.y, bins, looks_binary(pair.y));
  if (bx.constant || by.constant) {
    result.constant_series = true;
    return result;
  }
  std::vector<std::int32_t> scratch;
  result.nats =
      detail::mi_from_labels(bx.labels.data(), by.labels.data(), pair.x.size(), bx.levels,
                             by.levels, scratch);
  return result;
}

double tdmi_surrogate_threshold(const std::vector<double>& x, const std::vector<double>& y,
                                int lag, int bins, int shuffles, double quantile,
                                std::uint64_t seed) {
  require(shuffles > 0, Errc::InvalidArgument, "need at least one shuffle");
  AlignedPair pair = align(x, y, lag);
  auto bx = detail::bin_series(pair.x, bins, looks_binary(pair.x));
  const auto by = detail::bin_series(pair.y, bins, looks_binary(pair.y));
  if (bx.constant || by.constant) return 0.0;

  std::vector<double> null_mis(static_cast<std::size_t>(shuffles));
  std::vector<std::int32_t> scratch;
  for (int s = 0; s < shuffles; ++s) {
    Rng rng(derive_seed(seed, 0x5u, static_cast<std::uint64_t>(s)));
    rng.shuffle(bx.labels);
    null_mis[static_cast<std::size_t>(s)] =
        detail::mi_from_labels(bx.labels.data(), by.labels.data(), pair.x.size(), bx.levels,
                               by.levels, scratch);
  }
  std::sort(null_mis.begin(), null_mis.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(null_mis.size())));
  rank = std::min(std::max<std::size_t>(rank, 1), null_mis.size());
  return null_mis[rank - 1];
}

}  // namespace causaltwin
