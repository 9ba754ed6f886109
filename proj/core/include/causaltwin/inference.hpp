#pragma once

#include <cstdint>
#include <vector>

#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

// Structural surgery applied from start_step onward.
//  - Force: the variable is pinned to value (hard do()).
//  - ClampToMechanism: the variable follows its mechanism mean with the
//    exogenous input removed (binary: most likely outcome).
struct Intervention {
  enum class Kind { Force, ClampToMechanism };
  int var = 0;
  Kind kind = Kind::Force;
  double value = 0.0;
  std::size_t start_step = 0;
};

struct Trajectory {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t t, std::size_t i) const { return values[t * cols + i]; }
  void set(std::size_t t, std::size_t i, double v) { values[t * cols + i] = v; }
};

// Exogenous inputs for a simulation run: either seeded draws (Gaussian noise
// for continuous mechanisms, activation quantiles for binary ones) or fixed
// residuals taken from an abduction.
struct Exogenous {
  enum class Mode { Draw, Fixed };
  Mode mode = Mode::Draw;
  std::uint64_t seed = 0;
  const ResidualMatrix* residuals = nullptr;  // Fixed
  std::size_t offset = 0;  // residual row aligned with simulation step 0
};

// Evaluates the mutilated model forward for `horizon` steps. initial_window
// holds max_lag rows (row-major) of pre-history; evaluation follows the
// lag-0 topological order and rolls lagged values forward. With fixed
// residuals the output is deterministic; an empty intervention list with
// residuals abducted from observed data reproduces that data bit-exactly.
Trajectory simulate_do(const Scm& scm, const std::vector<Intervention>& interventions,
                       const std::vector<double>& initial_window, std::size_t horizon,
                       const Exogenous& exogenous);

// Monte Carlo estimate of E[target] under the intervention, averaged over
// `samples` seeded runs and all horizon steps.
double do_expectation(const Scm& scm, const std::vector<Intervention>& interventions,
                      const std::vector<double>& initial_window, std::size_t horizon,
                      int target, std::uint64_t seed, std::size_t samples);

// ---- Identification on the variable-level projection of the graph
// (latent_pairs enter as synthetic common causes).

bool d_separated(const CausalGraph& graph, const std::vector<int>& xs, const std::vector<int>& ys,
                 const std::vector<int>& given);

// Checks the backdoor criterion for a candidate set.
bool backdoor_valid(const CausalGraph& graph, int treatment, int outcome,
                    const std::vector<int>& adjustment);

struct IdentificationResult {
  enum class Strategy { Backdoor, Frontdoor, NotIdentifiable };
  Strategy strategy = Strategy::NotIdentifiable;
  std::vector<int> adjustment_set;  // Backdoor
  std::vector<int> mediators;       // Frontdoor
};

// Canonical backdoor set first (observed parents of the treatment), then a
// smallest-first frontdoor search over nodes on directed treatment->outcome
// paths. NotIdentifiable is a value, not an error. Identification runs on
// the variable-level projection, which must be acyclic; feedback loops that
// only a lag-indexed reading resolves are rejected as InvalidArgument.
IdentificationResult find_adjustment_set(const CausalGraph& graph, int treatment, int outcome);

struct AdjustmentEstimate {
  double value = 0.0;
  // Strata with no support at the requested treatment arm were dropped and
  // the stratum weights renormalized.
  int empty_strata = 0;
  bool regression_path = false;
};

// E[outcome | do(treatment = x)] by stratified adjustment when the treatment
// and every adjustment variable are binary, otherwise by linear regression
// adjustment averaged over the empirical adjustment distribution.
AdjustmentEstimate backdoor_effect(const TimeSeriesFrame& data, int treatment, int outcome,
                                   const std::vector<int>& adjustment, double x);

// Front-door functional with empirical plug-in distributions. Requires a
// binary treatment and binary mediators.
AdjustmentEstimate frontdoor_effect(const TimeSeriesFrame& data, int treatment, int outcome,
                                    const std::vector<int>& mediators, double x);

// ---- Counterfactuals: abduction, action, prediction over an evidence
// window. Continuous residuals are recovered exactly; binary mechanisms use
// the midpoint of the activation-quantile interval consistent with the
// observed outcome.

struct CounterfactualQuery {
  std::vector<Intervention> interventions;  // start_step indexes evidence rows
};

Trajectory counterfactual(const Scm& scm, const TimeSeriesFrame& evidence,
                          const CounterfactualQuery& query);

// Same, but binary latents are drawn uniformly inside their evidence-
// consistent intervals; used to integrate a counterfactual event probability.
std::vector<Trajectory> counterfactual_sampled(const Scm& scm, const TimeSeriesFrame& evidence,
                                               const CounterfactualQuery& query,
                                               std::size_t samples, std::uint64_t seed);

}  // namespace causaltwin
