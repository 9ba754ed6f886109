#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

// Per-variable aggregation weight: (|descendants| + |ancestors|) / (2n) on
// the variable-level graph, so structurally central variables count more.
// The weights are used as-is, without renormalization.
std::vector<double> mcai_weights(const CausalGraph& graph);

// Per-variable anomaly score at one step:
//   continuous: |v - mechanism mean| / residual std
//   binary:     -log(max(P[observed outcome], eps)) / -log(eps), eps = 1e-6
// so binary scores live in [0, 1] and saturate at impossible outcomes.
inline constexpr double kBinaryScoreEps = 1e-6;

struct StepResult {
  double mcai = 0.0;
  bool alarm = false;
  bool warmup = false;  // inside the initial lag window, score forced to 0
};

// Streaming scorer. Holds a ring buffer of the last max_lag observed rows;
// memory does not grow with the stream length. Lag-0 parents read the
// current observed row, so scoring never simulates.
class Detector {
 public:
  Detector(const Scm* scm, std::vector<double> alpha, double threshold);

  void reset();
  StepResult step(const double* row);  // row holds scm->size() raw values

  // Per-variable scores of the last non-warmup step.
  const std::vector<double>& scores() const { return scores_; }
  double threshold() const { return threshold_; }
  std::size_t steps_seen() const { return steps_seen_; }

 private:
  const Scm* scm_;
  std::vector<double> alpha_;
  double threshold_;
  int lag_;
  std::vector<double> history_;  // lag_ rows, ring indexed by steps_seen_
  std::vector<double> scores_;
  std::vector<double> parent_buf_;
  std::size_t steps_seen_ = 0;
};

struct ThresholdPolicy {
  enum class Kind { MaxF1, Quantile };
  Kind kind = Kind::Quantile;
  double quantile = 0.995;
};

// Calibrates the alarm threshold (alarm fires on score strictly above it).
// Quantile uses the order statistic of the normal-labeled scores (all scores
// when labels are empty). MaxF1 needs both classes present and returns the
// midpoint between the boundary scores of the best F1 split, preferring the
// higher threshold on ties.
double calibrate_threshold(const std::vector<double>& scores, const std::vector<std::int32_t>& labels,
                           const ThresholdPolicy& policy);

// Scores a whole frame through a fresh Detector (threshold irrelevant).
// mcai has one entry per row; the first max_lag rows are warmup zeros.
struct ScoreSeries {
  std::vector<double> mcai;
  std::size_t warmup = 0;
};

ScoreSeries collect_scores(const Scm& scm, const std::vector<double>& alpha,
                           const TimeSeriesFrame& frame);

struct AlarmEvent {
  std::size_t begin = 0;  // first alarmed step
  std::size_t end = 0;    // last alarmed step, inclusive
  double peak = 0.0;
  std::size_t peak_step = 0;
};

struct StreamOptions {
  // Alarm runs separated by at most this many quiet steps merge into one event.
  std::size_t merge_gap = 5;
  bool measure_latency = true;
  // Optional per-step sink; scores are not retained when it is set or absent,
  // keeping memory bounded by the model size plus the event list.
  std::function<void(std::size_t step, const StepResult&)> sink;
};

struct DetectReport {
  std::size_t steps = 0;
  std::size_t warmup_steps = 0;
  std::size_t alarm_steps = 0;
  std::vector<AlarmEvent> events;
  double peak_mcai = 0.0;
  double latency_mean_us = 0.0;
  double latency_p50_us = 0.0;
  double latency_p99_us = 0.0;  // reservoir-sampled, so bounded for any stream
};

DetectReport run_stream(const Scm& scm, const std::vector<double>& alpha, double threshold,
                        const TimeSeriesFrame& frame, const StreamOptions& options = {});

// Per-variable z-score reference detector: score = max_i |v_i - mu_i| /
// sigma_i over training moments, optionally on a trailing moving average of
// window rows. Variables with sigma below the floor are skipped.
class ZScoreBaseline {
 public:
  static ZScoreBaseline fit(const TimeSeriesFrame& train, int window = 1);

  void reset();
  double score(const double* row);

  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& sigma() const { return sigma_; }

 private:
  std::vector<double> mu_;
  std::vector<double> sigma_;  // <= 0 marks a skipped constant variable
  int window_ = 1;
  std::vector<double> ring_;
  std::vector<double> sums_;
  std::size_t steps_seen_ = 0;
};

std::vector<double> baseline_scores(ZScoreBaseline& baseline, const TimeSeriesFrame& frame);

}  // namespace causaltwin
