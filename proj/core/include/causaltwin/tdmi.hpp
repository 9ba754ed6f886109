#pragma once

#include <cstdint>
#include <vector>

#include "causaltwin/frame.hpp"

namespace causaltwin {

struct TdmiResult {
  double nats = 0.0;
  // Set when either side has a single distinct value; the estimate is 0.
  bool constant_series = false;
  std::size_t pairs = 0;
};

// Mutual information in nats between x(t - lag) and y(t), estimated with
// equal-frequency bins for continuous series and the two natural bins for
// 0/1 series. Requires more pairs than bins * bins.
TdmiResult tdmi(const std::vector<double>& x, const std::vector<double>& y, int lag,
                int bins = 16);

// 95th-percentile style null bound: the quantile of the MI obtained after
// shuffling x's bin labels, which destroys the temporal pairing.
double tdmi_surrogate_threshold(const std::vector<double>& x, const std::vector<double>& y,
                                int lag, int bins, int shuffles, double quantile,
                                std::uint64_t seed);

// How Phase I decides that a dependence is above noise floor.
struct DeltaPolicy {
  enum class Kind { Absolute, PermutationSurrogate };
  Kind kind = Kind::PermutationSurrogate;
  double absolute = 0.0;  // used by Kind::Absolute
  int shuffles = 40;
  double quantile = 0.95;
};

struct Candidate {
  int var = 0;
  int lag = 0;
  double tdmi = 0.0;
  double threshold = 0.0;
};

struct CandidateSet {
  int target = 0;
  bool constant_target = false;
  // Ranked by TDMI descending, capped at k.
  std::vector<Candidate> candidates;
};

// Phase I for one target: score every (variable, lag) pair against the
// target at lag 0, keep pairs above the policy threshold, rank, cap at k.
// Surrogate seeds derive only from (seed, source variable, shuffle index),
// so batch discovery and single-target calls agree.
CandidateSet select_candidates(const AugmentedFrame& aug, int target, int k,
                               const DeltaPolicy& policy, int bins, std::uint64_t seed,
                               std::size_t max_rows = 8000);

}  // namespace causaltwin
