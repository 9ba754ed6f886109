#include "causaltwin/defense.hpp"

#include <algorithm>
#include <cmath>

#include "causaltwin/error.hpp"
#include "causaltwin/inference.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/stats.hpp"

namespace causaltwin {

bool attack_succeeds(const SuccessPredicate& predicate, const TimeSeriesFrame& data,
                     std::size_t begin, std::size_t end) {
  require(predicate.var >= 0 && static_cast<std::size_t>(predicate.var) < data.cols(),
          Errc::InvalidArgument, "success predicate variable out of range");
  require(begin <= end && end < data.rows(), Errc::InvalidArgument, "window out of range");
  std::size_t excursions = 0;
  for (std::size_t t = begin; t <= end; ++t) {
    const double v = data.at(t, predicate.var);
    if (v < predicate.lo || v > predicate.hi) ++excursions;
  }
  return excursions >= predicate.min_steps;
}

namespace {

bool trajectory_success(const SuccessPredicate& predicate, const Trajectory& traj,
                        std::size_t begin, std::size_t end) {
  std::size_t excursions = 0;
  for (std::size_t t = begin; t <= end; ++t) {
    const double v = traj.at(t, predicate.var);
    if (v < predicate.lo || v > predicate.hi) ++excursions;
  }
  return excursions >= predicate.min_steps;
}

// First step in [onset, end] where the trigger predicate holds on the
// factual stream; the detector warms up over the preceding rows. Returns
// data.rows() when the defense never triggers. ClampTopScored also needs the
// per-variable scores at the trigger step, captured here.
std::size_t find_trigger(const Scm& scm, const std::vector<double>& alpha,
                         const TimeSeriesFrame& data, const AttackEpisode& episode,
                         const DefenseTrigger& trigger, std::vector<double>* trigger_scores) {
  const std::size_t lag = static_cast<std::size_t>(scm.max_lag());
  const std::size_t warm = episode.onset >= 4 * lag + 8 ? episode.onset - 4 * lag - 8 : 0;
  Detector detector(&scm, alpha, 0.0);
  std::vector<double> row(data.cols());
  for (std::size_t t = warm; t <= episode.end; ++t) {
    for (std::size_t i = 0; i < data.cols(); ++i) row[i] = data.at(t, i);
    const StepResult step = detector.step(row.data());
    if (t < episode.onset || step.warmup) continue;
    bool fired = false;
    if (trigger.kind == DefenseTrigger::Kind::McaiAbove) {
      fired = step.mcai > trigger.threshold;
    } else {
      for (double score : detector.scores()) {
        if (score > trigger.threshold) {
          fired = true;
          break;
        }
      }
    }
    if (fired) {
      if (trigger_scores != nullptr) *trigger_scores = detector.scores();
      return t;
    }
  }
  return data.rows();
}

std::vector<Intervention> action_interventions(const Scm& scm, const DefenseAction& action,
                                               const std::vector<double>& trigger_scores,
                                               std::size_t start_step) {
  std::vector<Intervention> out;
  switch (action.kind) {
    case DefenseAction::Kind::NoOp:
      break;
    case DefenseAction::Kind::ClampTopScored: {
      std::vector<int> order(scm.size());
      for (std::size_t i = 0; i < scm.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (trigger_scores[a] != trigger_scores[b]) return trigger_scores[a] > trigger_scores[b];
        return a < b;
      });
      const int k = std::min<int>(action.top_k, static_cast<int>(scm.size()));
      for (int j = 0; j < k; ++j) {
        out.push_back({order[j], Intervention::Kind::ClampToMechanism, 0.0, start_step});
      }
      break;
    }
    case DefenseAction::Kind::ClampFixed:
      for (int var : action.variables) {
        require(var >= 0 && static_cast<std::size_t>(var) < scm.size(), Errc::InvalidArgument,
                "defense action variable out of range");
        out.push_back({var, Intervention::Kind::ClampToMechanism, 0.0, start_step});
      }
      break;
    case DefenseAction::Kind::ForceValue: {
      require(action.values.size() == action.variables.size(), Errc::InvalidArgument,
              "defense action values must align with variables");
      for (std::size_t j = 0; j < action.variables.size(); ++j) {
        const int var = action.variables[j];
        require(var >= 0 && static_cast<std::size_t>(var) < scm.size(), Errc::InvalidArgument,
                "defense action variable out of range");
        out.push_back({var, Intervention::Kind::Force, action.values[j], start_step});
      }
      break;
    }
  }
  return out;
}

}  // namespace

EpisodeReplay replay_with_defense(const Scm& scm, const std::vector<double>& alpha,
                                  const TimeSeriesFrame& data, const AttackEpisode& episode,
                                  const DefenseSpec& defense, const DefenseReplayOptions& options) {
  require(data.cols() == scm.size(), Errc::NodeUniverseMismatch, "data does not match the model");
  const std::size_t lag = static_cast<std::size_t>(scm.max_lag());
  require(episode.onset >= lag && episode.end >= episode.onset && episode.end < data.rows(),
          Errc::InvalidArgument, "episode window out of range");

  EpisodeReplay replay;
  replay.factual_success = attack_succeeds(episode.success, data, episode.onset, episode.end);

  std::vector<double> trigger_scores;
  const std::size_t trigger_step =
      find_trigger(scm, alpha, data, episode, defense.trigger, &trigger_scores);
  replay.triggered = trigger_step < data.rows();
  if (!replay.triggered) {
    // Never triggered: the counterfactual equals the factual episode.
    replay.prevented = false;
    replay.blocked_probability = 0.0;
    return replay;
  }
  replay.trigger_step = trigger_step;

  const std::size_t evidence_begin = episode.onset - lag;
  const TimeSeriesFrame evidence = slice_rows(data, evidence_begin, episode.end + 1);
  CounterfactualQuery query;
  query.interventions = action_interventions(scm, defense.action, trigger_scores,
                                             trigger_step - evidence_begin);

  const std::size_t window_begin = episode.onset - evidence_begin;
  const std::size_t window_end = episode.end - evidence_begin;
  const Trajectory cf = counterfactual(scm, evidence, query);
  replay.prevented = !trajectory_success(episode.success, cf, window_begin, window_end);

  if (query.interventions.empty()) {
    replay.blocked_probability = replay.prevented ? 1.0 : 0.0;
    return replay;
  }
  const std::vector<Trajectory> draws =
      counterfactual_sampled(scm, evidence, query, options.blocked_samples, options.seed);
  std::size_t blocked = 0;
  for (const Trajectory& draw : draws) {
    if (!trajectory_success(episode.success, draw, window_begin, window_end)) ++blocked;
  }
  replay.blocked_probability = static_cast<double>(blocked) / static_cast<double>(draws.size());
  return replay;
}

std::vector<DefenseOutcome> evaluate_defense_portfolio(const Scm& scm,
                                                       const std::vector<double>& alpha,
                                                       const TimeSeriesFrame& data,
                                                       const std::vector<AttackEpisode>& episodes,
                                                       const std::vector<DefenseSpec>& defenses,
                                                       const DefenseReplayOptions& options) {
  require(!episodes.empty(), Errc::InvalidArgument, "need at least one episode");
  require(!defenses.empty(), Errc::InvalidArgument, "need at least one defense");

  std::vector<DefenseOutcome> outcomes;
  for (const DefenseSpec& defense : defenses) {
    DefenseOutcome outcome;
    outcome.name = defense.name;
    outcome.cost = defense.cost;
    double blocked_total = 0.0;
    for (const AttackEpisode& episode : episodes) {
      const EpisodeReplay replay = replay_with_defense(scm, alpha, data, episode, defense, options);
      if (!replay.factual_success) continue;  // nothing to prevent
      ++outcome.attacks_total;
      if (!replay.triggered) ++outcome.no_trigger;
      if (replay.prevented) ++outcome.attacks_prevented;
      blocked_total += replay.blocked_probability;
    }
    if (outcome.attacks_total > 0) {
      outcome.success_rate_reduction = static_cast<double>(outcome.attacks_prevented) /
                                       static_cast<double>(outcome.attacks_total);
      const auto [lo, hi] = wilson_interval(outcome.attacks_prevented, outcome.attacks_total);
      outcome.srr_ci_low = lo;
      outcome.srr_ci_high = hi;
      outcome.mean_blocked_probability = blocked_total / static_cast<double>(outcome.attacks_total);
    }
    outcome.roi = outcome.success_rate_reduction * 100.0 / static_cast<double>(outcome.cost);
    outcomes.push_back(std::move(outcome));
  }
  std::sort(outcomes.begin(), outcomes.end(), [](const DefenseOutcome& a, const DefenseOutcome& b) {
    if (a.roi != b.roi) return a.roi > b.roi;
    return a.name < b.name;
  });
  return outcomes;
}

CounterfactualMetrics counterfactual_metrics(const Scm& fitted, const Scm& truth,
                                             const TimeSeriesFrame& data,
                                             const std::vector<NaturalExperiment>& experiments,
                                             const CounterfactualMetricsOptions& options) {
  require(!experiments.empty(), Errc::MissingGroundTruth, "no natural experiments supplied");
  require(fitted.size() == truth.size() && data.cols() == fitted.size(),
          Errc::NodeUniverseMismatch, "models and data disagree on the variable set");

  CounterfactualMetrics metrics;
  metrics.experiments = experiments.size();
  const std::size_t lag =
      static_cast<std::size_t>(std::max(fitted.max_lag(), truth.max_lag()));

  std::size_t matches = 0;
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    const NaturalExperiment& ex = experiments[e];
    require(ex.begin >= lag && ex.end >= ex.begin && ex.end < data.rows(), Errc::InvalidArgument,
            "experiment window out of range");
    require(data.meta()[ex.outcome].kind == VariableKind::BinaryActuator, Errc::InvalidArgument,
            "experiment outcome must be binary");
    const std::size_t horizon = ex.end - ex.begin + 1;

    // Observed outcome rate under the generator's forcing.
    double observed = 0.0;
    for (std::size_t t = ex.begin; t <= ex.end; ++t) observed += data.at(t, ex.outcome);
    observed /= static_cast<double>(horizon);

    // Model prediction for the same do() from the same starting state.
    std::vector<double> initial(lag * fitted.size());
    for (std::size_t t = 0; t < lag; ++t) {
      for (std::size_t i = 0; i < fitted.size(); ++i) {
        initial[t * fitted.size() + i] = data.at(ex.begin - lag + t, i);
      }
    }
    const std::vector<Intervention> doing{
        {ex.treatment, Intervention::Kind::Force, ex.forced_value, 0}};
    const double predicted =
        do_expectation(fitted, doing, initial, horizon, ex.outcome,
                       derive_seed(options.seed, 0x1fe, e), options.prediction_samples);
    metrics.ipe += std::abs(observed - predicted);

    // Counterfactual flip of the forcing, answered by both models; the truth
    // model's answer is the ground truth.
    const TimeSeriesFrame evidence = slice_rows(data, ex.begin - lag, ex.end + 1);
    CounterfactualQuery query;
    query.interventions = {
        {ex.treatment, Intervention::Kind::Force, ex.counterfactual_value, lag}};
    const Trajectory cf_fitted = counterfactual(fitted, evidence, query);
    const Trajectory cf_truth = counterfactual(truth, evidence, query);
    double rate_fitted = 0.0;
    double rate_truth = 0.0;
    for (std::size_t t = lag; t < evidence.rows(); ++t) {
      rate_fitted += cf_fitted.at(t, ex.outcome);
      rate_truth += cf_truth.at(t, ex.outcome);
    }
    rate_fitted /= static_cast<double>(horizon);
    rate_truth /= static_cast<double>(horizon);
    if ((rate_fitted >= 0.5) == (rate_truth >= 0.5)) ++matches;
  }
  metrics.ipe /= static_cast<double>(experiments.size());
  metrics.cfa = static_cast<double>(matches) / static_cast<double>(experiments.size());
  return metrics;
}

}  // namespace causaltwin
