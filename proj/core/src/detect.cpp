#include "causaltwin/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/stats.hpp"

namespace causaltwin {

std::vector<double> mcai_weights(const CausalGraph& graph) {
  const std::size_t n = graph.size();
  require(n > 0, Errc::InvalidArgument, "empty graph");
  std::vector<double> alpha(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double reach = static_cast<double>(graph.descendants_of(static_cast<int>(i)).size() +
                                             graph.ancestors_of(static_cast<int>(i)).size());
    alpha[i] = reach / (2.0 * static_cast<double>(n));
  }
  return alpha;
}

Detector::Detector(const Scm* scm, std::vector<double> alpha, double threshold)
    : scm_(scm), alpha_(std::move(alpha)), threshold_(threshold), lag_(scm->max_lag()) {
  require(alpha_.size() == scm_->size(), Errc::NodeUniverseMismatch,
          "weight vector does not match the model");
  history_.assign(static_cast<std::size_t>(std::max(lag_, 1)) * scm_->size(), 0.0);
  scores_.assign(scm_->size(), 0.0);
}

void Detector::reset() {
  steps_seen_ = 0;
  std::fill(history_.begin(), history_.end(), 0.0);
  std::fill(scores_.begin(), scores_.end(), 0.0);
}

StepResult Detector::step(const double* row) {
  const std::size_t n = scm_->size();
  StepResult result;
  if (steps_seen_ < static_cast<std::size_t>(lag_)) {
    result.warmup = true;
    std::fill(scores_.begin(), scores_.end(), 0.0);
  } else {
    static const double kLogEps = -std::log(kBinaryScoreEps);
    double mcai = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const StructuralEquation& eq = scm_->equations[i];
      parent_buf_.resize(eq.parents.size());
      for (std::size_t p = 0; p < eq.parents.size(); ++p) {
        const ColumnKey key = eq.parents[p];
        if (key.lag == 0) {
          parent_buf_[p] = row[key.var];
        } else {
          // Ring slot for the row observed key.lag steps ago.
          const std::size_t slot = (steps_seen_ - key.lag) % static_cast<std::size_t>(lag_);
          parent_buf_[p] = history_[slot * n + key.var];
        }
      }
      double score = 0.0;
      if (eq.form == StructuralEquation::Form::Logistic) {
        const double p1 = scm_->mechanism_probability(static_cast<int>(i), parent_buf_.data());
        const double p_obs = row[i] > 0.5 ? p1 : 1.0 - p1;
        score = -std::log(std::max(p_obs, kBinaryScoreEps)) / kLogEps;
      } else {
        const double mean = scm_->mechanism_mean(static_cast<int>(i), parent_buf_.data());
        const double sigma = std::max(scm_->sigma_raw(static_cast<int>(i)), 1e-12);
        score = std::abs(row[i] - mean) / sigma;
      }
      scores_[i] = score;
      mcai += alpha_[i] * score;
    }
    result.mcai = mcai;
    result.alarm = mcai > threshold_;
  }
  if (lag_ > 0) {
    const std::size_t slot = steps_seen_ % static_cast<std::size_t>(lag_);
    std::copy(row, row + n, history_.begin() + slot * n);
  }
  ++steps_seen_;
  return result;
}

double calibrate_threshold(const std::vector<double>& scores, const std::vector<std::int32_t>& labels,
                           const ThresholdPolicy& policy) {
  require(!scores.empty(), Errc::InsufficientData, "no scores to calibrate on");
  require(labels.empty() || labels.size() == scores.size(), Errc::InvalidArgument,
          "labels must align with scores");

  if (policy.kind == ThresholdPolicy::Kind::Quantile) {
    std::vector<double> normal;
    if (labels.empty()) {
      normal = scores;
    } else {
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) normal.push_back(scores[i]);
      }
    }
    require(!normal.empty(), Errc::InsufficientData, "no normal rows to calibrate on");
    return quantile_of(std::move(normal), policy.quantile);
  }

  require(!labels.empty(), Errc::NoLabels, "max-F1 calibration needs labels");
  std::vector<std::pair<double, int>> ranked(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int y = labels[i] != 0 ? 1 : 0;
    positives += y;
    ranked[i] = {scores[i], y};
  }
  require(positives > 0 && positives < scores.size(), Errc::NoLabels,
          "max-F1 calibration needs both classes");
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  // Sweep prediction cuts at distinct score boundaries; k items alarm.
  double best_f1 = -1.0;
  double best_threshold = ranked.front().first;  // k = 0: nothing alarms
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    tp += ranked[k].second;
    if (k + 1 < ranked.size() && ranked[k + 1].first == ranked[k].first) continue;
    const double fp = static_cast<double>(k + 1 - tp);
    const double fn = static_cast<double>(positives - tp);
    const double f1 = 2.0 * tp / (2.0 * tp + fp + fn);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_threshold = k + 1 < ranked.size()
                           ? 0.5 * (ranked[k].first + ranked[k + 1].first)
                           : ranked[k].first - 0.5 * std::abs(ranked[k].first) - 0.5;
    }
  }
  return best_threshold;
}

ScoreSeries collect_scores(const Scm& scm, const std::vector<double>& alpha,
                           const TimeSeriesFrame& frame) {
  require(frame.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "frame does not match the model");
  require(!frame.has_missing(), Errc::MissingEvidence, "scoring needs complete rows");
  Detector detector(&scm, alpha, 0.0);
  ScoreSeries series;
  series.warmup = static_cast<std::size_t>(scm.max_lag());
  series.mcai.resize(frame.rows());
  std::vector<double> row(frame.cols());
  for (std::size_t t = 0; t < frame.rows(); ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) row[i] = frame.at(t, i);
    series.mcai[t] = detector.step(row.data()).mcai;
  }
  return series;
}

DetectReport run_stream(const Scm& scm, const std::vector<double>& alpha, double threshold,
                        const TimeSeriesFrame& frame, const StreamOptions& options) {
  require(frame.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "frame does not match the model");
  require(!frame.has_missing(), Errc::MissingEvidence, "scoring needs complete rows");
  using clock = std::chrono::steady_clock;

  Detector detector(&scm, alpha, threshold);
  DetectReport report;
  report.steps = frame.rows();
  report.warmup_steps = std::min<std::size_t>(frame.rows(), scm.max_lag());

  // Fixed-size reservoir keeps latency percentiles bounded on long streams.
  constexpr std::size_t kReservoir = 4096;
  std::vector<double> latencies;
  latencies.reserve(kReservoir);
  Rng reservoir_rng(0x9d2c5680);
  double latency_total = 0.0;

  std::vector<double> row(frame.cols());
  bool open = false;
  AlarmEvent current;
  std::size_t last_alarm_step = 0;

  for (std::size_t t = 0; t < frame.rows(); ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) row[i] = frame.at(t, i);
    const auto started = options.measure_latency ? clock::now() : clock::time_point{};
    const StepResult step = detector.step(row.data());
    if (options.measure_latency) {
      const double us =
          std::chrono::duration<double, std::micro>(clock::now() - started).count();
      latency_total += us;
      if (latencies.size() < kReservoir) {
        latencies.push_back(us);
      } else {
        const std::size_t j = static_cast<std::size_t>(reservoir_rng.uniform_int(t + 1));
        if (j < kReservoir) latencies[j] = us;
      }
    }
    if (options.sink) options.sink(t, step);
    report.peak_mcai = std::max(report.peak_mcai, step.mcai);
    if (!step.alarm) continue;
    ++report.alarm_steps;
    if (open && t - last_alarm_step <= options.merge_gap + 1) {
      current.end = t;
      if (step.mcai > current.peak) {
        current.peak = step.mcai;
        current.peak_step = t;
      }
    } else {
      if (open) report.events.push_back(current);
      current = AlarmEvent{t, t, step.mcai, t};
      open = true;
    }
    last_alarm_step = t;
  }
  if (open) report.events.push_back(current);

  if (options.measure_latency && report.steps > 0) {
    report.latency_mean_us = latency_total / static_cast<double>(report.steps);
    report.latency_p50_us = quantile_of(latencies, 0.5);
    report.latency_p99_us = quantile_of(std::move(latencies), 0.99);
  }
  return report;
}

ZScoreBaseline ZScoreBaseline::fit(const TimeSeriesFrame& train, int window) {
  require(train.rows() > 1, Errc::SeriesTooShort, "baseline needs at least two rows");
  require(window >= 1, Errc::InvalidArgument, "window must be positive");
  ZScoreBaseline baseline;
  baseline.window_ = window;
  const std::size_t n = train.cols();
  baseline.mu_.resize(n);
  baseline.sigma_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> col = train.column(i);
    baseline.mu_[i] = mean_of(col);
    const double sd = stddev_of(col);
    baseline.sigma_[i] = sd < 1e-12 ? 0.0 : sd;  // constants never alarm
  }
  baseline.ring_.assign(static_cast<std::size_t>(window) * n, 0.0);
  baseline.sums_.assign(n, 0.0);
  return baseline;
}

void ZScoreBaseline::reset() {
  steps_seen_ = 0;
  std::fill(ring_.begin(), ring_.end(), 0.0);
  std::fill(sums_.begin(), sums_.end(), 0.0);
}

double ZScoreBaseline::score(const double* row) {
  const std::size_t n = mu_.size();
  const std::size_t slot = steps_seen_ % static_cast<std::size_t>(window_);
  const std::size_t filled = std::min<std::size_t>(steps_seen_ + 1, window_);
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (steps_seen_ >= static_cast<std::size_t>(window_)) sums_[i] -= ring_[slot * n + i];
    sums_[i] += row[i];
    ring_[slot * n + i] = row[i];
    if (sigma_[i] <= 0.0) continue;
    const double avg = sums_[i] / static_cast<double>(filled);
    best = std::max(best, std::abs(avg - mu_[i]) / sigma_[i]);
  }
  ++steps_seen_;
  return best;
}

std::vector<double> baseline_scores(ZScoreBaseline& baseline, const TimeSeriesFrame& frame) {
  std::vector<double> out(frame.rows());
  std::vector<double> row(frame.cols());
  for (std::size_t t = 0; t < frame.rows(); ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) row[i] = frame.at(t, i);
    out[t] = baseline.score(row.data());
  }
  return out;
}

}  // namespace causaltwin
