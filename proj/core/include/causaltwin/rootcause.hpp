#pragma once

#include <cstdint>
#include <vector>

#include "causaltwin/detect.hpp"
#include "causaltwin/frame.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

struct RootCauseOptions {
  // Steps before the event onset used for the per-variable normal reference
  // (median value and score percentile). All of them must exist in the data.
  std::size_t normal_window = 300;
  std::size_t max_candidates = 15;
  // Exact coalition enumeration up to this many candidates, permutation
  // sampling beyond it.
  std::size_t exact_limit = 12;
  std::size_t budget = 2000;  // permutations for the sampled path
  // Monte Carlo samples per coalition value; the same seeds pair every
  // coalition, so differences cancel the shared noise.
  std::size_t samples = 4;
  std::uint64_t seed = 0;
  double exceedance_quantile = 0.99;
};

// Interventional effect of pinning one variable to its alarm-time value
// versus its normal reference, as the paired difference of mean detector
// scores over the event horizon.
double causal_effect(const Scm& scm, const std::vector<double>& alpha,
                     const TimeSeriesFrame& data, const AlarmEvent& event, int variable,
                     const RootCauseOptions& options = {});

struct ShapleyResult {
  std::vector<double> phi;  // aligned with candidates
  bool exact = false;
  // |f(full) - f(empty) - sum phi| relative to the value range, before the
  // final rescale that restores efficiency. Flagged above 5%.
  double efficiency_correction = 0.0;
  bool rescaled = false;
  std::size_t evaluations = 0;
};

// Shapley attribution of the anomaly value function
// f(S) = E[mean MCAI | do(V_S = alarm-time values)] over the candidates.
ShapleyResult shapley(const Scm& scm, const std::vector<double>& alpha,
                      const TimeSeriesFrame& data, const AlarmEvent& event,
                      const std::vector<int>& candidates, const RootCauseOptions& options = {});

struct RankingEntry {
  int var = 0;
  double ce = 0.0;
  double phi = 0.0;
};

struct RootCauseRanking {
  std::size_t onset = 0;
  std::size_t end = 0;
  // Sorted by phi descending, then CE descending, then variable index.
  std::vector<RankingEntry> entries;
  bool fallback_candidates = false;  // no per-variable exceedance, top-5 by score
  bool exact = false;
  double efficiency_correction = 0.0;
  bool rescaled = false;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
  double attribution_seconds = 0.0;
};

// Candidate selection (per-variable score above its normal-window
// percentile, capped), then CE and Shapley on the candidates.
RootCauseRanking rank_roots(const Scm& scm, const std::vector<double>& alpha,
                            const TimeSeriesFrame& data, const AlarmEvent& event,
                            const RootCauseOptions& options = {});

struct AttributionMetrics {
  double top1 = 0.0;
  double top3 = 0.0;
  double top5 = 0.0;
  double mrr = 0.0;
  double mean_seconds = 0.0;
  std::size_t events = 0;
};

// Top-k hit rates and mean reciprocal rank against per-event ground truth.
AttributionMetrics attribution_metrics(const std::vector<RootCauseRanking>& rankings,
                                       const std::vector<int>& truth);

}  // namespace causaltwin
