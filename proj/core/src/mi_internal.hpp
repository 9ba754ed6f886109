#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace causaltwin::detail {

struct BinnedSeries {
  std::vector<std::uint16_t> labels;
  int levels = 1;
  bool constant = false;
};

// Equal-frequency binning; duplicate quantile edges collapse so heavily tied
// series get fewer effective levels. 0/1 series use their two natural bins.
inline BinnedSeries bin_series(const std::vector<double>& xs, int bins, bool binary) {
  BinnedSeries out;
  out.labels.resize(xs.size());
  if (binary) {
    int ones = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const bool on = xs[i] > 0.5;
      out.labels[i] = on ? 1 : 0;
      ones += on ? 1 : 0;
    }
    out.levels = 2;
    out.constant = ones == 0 || ones == static_cast<int>(xs.size());
    return out;
  }
  std::vector<double> sorted(xs);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    out.constant = true;
    return out;
  }
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(bins));
  for (int b = 1; b < bins; ++b) {
    const std::size_t pos =
        std::min(sorted.size() - 1, static_cast<std::size_t>(static_cast<double>(b) *
                                                             static_cast<double>(sorted.size()) /
                                                             static_cast<double>(bins)));
    const double edge = sorted[pos];
    if (edges.empty() || edge > edges.back()) edges.push_back(edge);
  }
  out.levels = static_cast<int>(edges.size()) + 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.labels[i] = static_cast<std::uint16_t>(
        std::upper_bound(edges.begin(), edges.end(), xs[i]) - edges.begin());
  }
  out.constant = out.levels < 2;
  return out;
}

// Plug-in MI over a joint histogram of label pairs. counts must hold
// lx * ly zero-initialized slots; it is scratch space owned by the caller.
inline double mi_from_labels(const std::uint16_t* xl, const std::uint16_t* yl, std::size_t n,
                             int lx, int ly, std::vector<std::int32_t>& counts) {
  counts.assign(static_cast<std::size_t>(lx) * static_cast<std::size_t>(ly), 0);
  for (std::size_t i = 0; i < n; ++i) counts[xl[i] * ly + yl[i]] += 1;

  std::vector<std::int64_t> rows(lx, 0), cols(ly, 0);
  for (int a = 0; a < lx; ++a) {
    for (int b = 0; b < ly; ++b) {
      rows[a] += counts[a * ly + b];
      cols[b] += counts[a * ly + b];
    }
  }
  const double total = static_cast<double>(n);
  double mi = 0.0;
  for (int a = 0; a < lx; ++a) {
    if (rows[a] == 0) continue;
    for (int b = 0; b < ly; ++b) {
      const std::int32_t c = counts[a * ly + b];
      if (c == 0) continue;
      mi += (c / total) * std::log(c * total / (static_cast<double>(rows[a]) *
                                                static_cast<double>(cols[b])));
    }
  }
  return std::max(mi, 0.0);
}

}  // namespace causaltwin::detail
