#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causaltwin/detect.hpp"
#include "causaltwin/frame.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

// Generator-declared test for whether an attack achieved its goal: the
// monitored variable leaves [lo, hi] for at least min_steps rows of the
// episode window.
struct SuccessPredicate {
  int var = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t min_steps = 1;
};

struct AttackEpisode {
  int id = 0;                 // label value in the frame
  std::string kind;           // generator scenario tag, e.g. "stealthy-ramp"
  int root_var = -1;          // first manipulated variable
  std::vector<int> targets;   // all manipulated variables
  std::size_t onset = 0;
  std::size_t end = 0;        // inclusive
  SuccessPredicate success;
};

// A window of the normal stream where the generator pinned one variable,
// giving an observational stand-in for a do() experiment.
struct NaturalExperiment {
  int treatment = 0;
  double forced_value = 0.0;
  double counterfactual_value = 0.0;  // alternative arm for accuracy checks
  int outcome = 0;                    // binary variable
  std::size_t begin = 0;
  std::size_t end = 0;  // inclusive
};

struct DefenseTrigger {
  enum class Kind { McaiAbove, PerVariableAbove };
  Kind kind = Kind::McaiAbove;
  double threshold = 0.0;
};

struct DefenseAction {
  enum class Kind { NoOp, ClampTopScored, ClampFixed, ForceValue };
  Kind kind = Kind::NoOp;
  int top_k = 1;               // ClampTopScored: clamp the k highest-scored variables
  std::vector<int> variables;  // ClampFixed / ForceValue
  std::vector<double> values;  // ForceValue, aligned with variables
};

enum class DefenseCost : int { Low = 1, Medium = 2, High = 3 };

struct DefenseSpec {
  std::string name;
  DefenseTrigger trigger;
  DefenseAction action;
  DefenseCost cost = DefenseCost::Low;
};

struct DefenseReplayOptions {
  std::size_t blocked_samples = 16;  // binary-latent draws for the probability
  std::uint64_t seed = 0;
};

struct EpisodeReplay {
  bool factual_success = false;
  bool triggered = false;
  std::size_t trigger_step = 0;  // absolute row, valid when triggered
  bool prevented = false;        // success predicate fails in the replay
  double blocked_probability = 0.0;
};

// Abducts the episode, applies the defense action from its first trigger
// step, re-simulates, and re-evaluates the success predicate. A defense that
// never triggers leaves the episode unchanged (flagged via triggered).
EpisodeReplay replay_with_defense(const Scm& scm, const std::vector<double>& alpha,
                                  const TimeSeriesFrame& data, const AttackEpisode& episode,
                                  const DefenseSpec& defense,
                                  const DefenseReplayOptions& options = {});

struct DefenseOutcome {
  std::string name;
  DefenseCost cost = DefenseCost::Low;
  std::size_t attacks_total = 0;      // factually successful episodes
  std::size_t attacks_prevented = 0;
  std::size_t no_trigger = 0;
  double success_rate_reduction = 0.0;
  double srr_ci_low = 0.0;
  double srr_ci_high = 0.0;
  double mean_blocked_probability = 0.0;
  double roi = 0.0;  // success_rate_reduction * 100 / cost
};

// Replays every factually successful episode under every defense and ranks
// the outcomes by ROI (ties by name).
std::vector<DefenseOutcome> evaluate_defense_portfolio(const Scm& scm,
                                                       const std::vector<double>& alpha,
                                                       const TimeSeriesFrame& data,
                                                       const std::vector<AttackEpisode>& episodes,
                                                       const std::vector<DefenseSpec>& defenses,
                                                       const DefenseReplayOptions& options = {});

// Whether the attack succeeds on the given rows of a value matrix laid out
// like the frame (used for both factual data and replays).
bool attack_succeeds(const SuccessPredicate& predicate, const TimeSeriesFrame& data,
                     std::size_t begin, std::size_t end);

struct CounterfactualMetricsOptions {
  std::size_t prediction_samples = 512;  // Monte Carlo draws for do() probabilities
  std::uint64_t seed = 0;
};

struct CounterfactualMetrics {
  // Mean |observed outcome rate - predicted do() probability| over the
  // natural experiments.
  double ipe = 0.0;
  // Fraction of experiments where the fitted model's counterfactual binary
  // outcome matches the generator model's.
  double cfa = 0.0;
  std::size_t experiments = 0;
};

CounterfactualMetrics counterfactual_metrics(const Scm& fitted, const Scm& truth,
                                             const TimeSeriesFrame& data,
                                             const std::vector<NaturalExperiment>& experiments,
                                             const CounterfactualMetricsOptions& options = {});

}  // namespace causaltwin
