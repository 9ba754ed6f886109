#include <doctest.h>

#include <cmath>

#include "causaltwin/tdmi.hpp"
#include "helpers.hpp"

using namespace causaltwin;

namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.normal();
  return xs;
}

}  // namespace

TEST_CASE("tdmi peaks at the true lag of a shifted copy") {
  const std::size_t n = 6000;
  auto x = white_noise(n, 11);
  std::vector<double> y(n, 0.0);
  for (std::size_t t = 3; t < n; ++t) y[t] = x[t - 3];

  double best = -1.0;
  int best_lag = -1;
  for (int lag = 0; lag <= 5; ++lag) {
    const TdmiResult r = tdmi(x, y, lag);
    REQUIRE_FALSE(r.constant_series);
    if (r.nats > best) {
      best = r.nats;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 3);
  // A 16-bin discretization of an identical pair carries about log(16) nats.
  CHECK(best > 2.0);
}

TEST_CASE("tdmi on independent noise stays near the plug-in bias floor") {
  const std::size_t n = 10000;
  auto x = white_noise(n, 21);
  auto y = white_noise(n, 22);
  for (int lag : {0, 1, 4}) {
    const TdmiResult r = tdmi(x, y, lag);
    CHECK(r.nats >= 0.0);
    CHECK(r.nats < 0.02);  // (bins-1)^2 / (2 pairs) ~ 0.011 nats at this size
  }
}

TEST_CASE("tdmi is monotone in dependence strength") {
  const std::size_t n = 20000;
  Rng rng(31);
  std::vector<double> x(n), y_weak(n), y_strong(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = rng.normal();
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    y_weak[t] = 0.4 * x[t] + std::sqrt(1 - 0.16) * e1;
    y_strong[t] = 0.9 * x[t] + std::sqrt(1 - 0.81) * e2;
  }
  const double weak = tdmi(x, y_weak, 0).nats;
  const double strong = tdmi(x, y_strong, 0).nats;
  const double none = tdmi(x, white_noise(n, 32), 0).nats;
  CHECK(strong > weak);
  CHECK(weak > none + 0.05);
}

TEST_CASE("tdmi at lag 0 is symmetric in its arguments") {
  const std::size_t n = 5000;
  Rng rng(41);
  std::vector<double> x(n), y(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = rng.normal();
    y[t] = 0.6 * x[t] + rng.normal();
  }
  CHECK(tdmi(x, y, 0).nats == doctest::Approx(tdmi(y, x, 0).nats).epsilon(1e-12));
}

TEST_CASE("tdmi flags constant series") {
  const std::size_t n = 2000;
  auto x = white_noise(n, 51);
  std::vector<double> flat(n, 3.5);
  const TdmiResult r = tdmi(x, flat, 0);
  CHECK(r.constant_series);
  CHECK(r.nats == 0.0);
}

TEST_CASE("tdmi needs more pairs than bins squared") {
  auto x = white_noise(256, 61);
  CHECK_RAISES(tdmi(x, x, 0, 16), Errc::SeriesTooShort);
  auto ok = white_noise(300, 62);
  CHECK(tdmi(ok, ok, 0, 16).nats > 0.0);
}

TEST_CASE("binary series use their two natural bins") {
  const std::size_t n = 4000;
  Rng rng(71);
  std::vector<double> b(n), y(n);
  for (std::size_t t = 0; t < n; ++t) {
    b[t] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    y[t] = 2.0 * b[t] + 0.1 * rng.normal();
  }
  // MI of a fair coin with an almost deterministic readout approaches log 2.
  const double nats = tdmi(b, y, 0).nats;
  CHECK(nats > 0.6);
  CHECK(nats < std::log(2.0) + 0.01);
}

TEST_CASE("surrogate threshold separates paired from shuffled data") {
  const std::size_t n = 8000;
  Rng rng(81);
  std::vector<double> x(n), y(n);
  for (std::size_t t = 1; t < n; ++t) {
    x[t] = rng.normal();
    y[t] = 0.8 * x[t - 1] + 0.6 * rng.normal();
  }
  const double threshold = tdmi_surrogate_threshold(x, y, 1, 16, 40, 0.95, 123);
  CHECK(threshold > 0.0);
  CHECK(threshold < 0.05);  // null MI lives at the bias floor
  CHECK(tdmi(x, y, 1).nats > threshold);

  // Independent pair at the same size stays below its own surrogate bound.
  auto u = white_noise(n, 82);
  auto v = white_noise(n, 83);
  CHECK(tdmi(u, v, 1).nats <= tdmi_surrogate_threshold(u, v, 1, 16, 40, 0.95, 123));
}

TEST_CASE("surrogate threshold is deterministic in the seed") {
  auto x = white_noise(3000, 91);
  auto y = white_noise(3000, 92);
  const double a = tdmi_surrogate_threshold(x, y, 2, 16, 40, 0.95, 7);
  const double b = tdmi_surrogate_threshold(x, y, 2, 16, 40, 0.95, 7);
  CHECK(a == b);
}
