#pragma once

#include <cstdint>
#include <vector>

#include "causaltwin/defense.hpp"
#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

// Structural distance between two graphs over the same variables. Skeleton
// elements are lag-0 adjacencies (unordered) and lagged adjacencies (ordered
// by time); the distance counts elements present in only one graph plus
// shared lag-0 adjacencies whose direction disagrees, normalized by the two
// edge counts so 0 is equality and 1 is total disagreement.
struct ShdBreakdown {
  std::size_t missing = 0;      // skeleton elements only in truth
  std::size_t extra = 0;        // skeleton elements only in discovered
  std::size_t misoriented = 0;  // shared lag-0 adjacencies, opposite direction
  std::size_t truth_edges = 0;
  std::size_t discovered_edges = 0;
  double normalized = 0.0;
};

ShdBreakdown shd(const CausalGraph& truth, const CausalGraph& discovered);

// Fraction of discovered edges whose directed class pair the catalog allows,
// among edges the catalog mentions at all (either direction, or a forbidden
// pair). No covered edges reports 1.0 with the vacuous flag set.
struct PccReport {
  std::size_t covered = 0;
  std::size_t compliant = 0;
  bool vacuous = false;
  double value = 1.0;
};

PccReport pcc(const CausalGraph& discovered, const ConstraintCatalog& catalog);

// Fraction of discovered edges whose empirical cross-correlation between
// cause and effect peaks at a non-negative lag (cause not later than
// effect). Edges on constant columns cannot be checked and are excluded.
struct TccReport {
  std::size_t checked = 0;
  std::size_t compliant = 0;
  double value = 1.0;
};

TccReport tcc(const CausalGraph& discovered, const TimeSeriesFrame& frame);

// Forward-chaining cross-validation of the mechanisms implied by a graph:
// the series is cut into folds + 1 contiguous blocks, fold k fits on blocks
// 0..k and scores one-step predictions on block k+1. Scores cover continuous
// variables with at least one parent; parentless and binary variables have
// no regression to validate.
struct CvVariableScore {
  int var = 0;
  double mse = 0.0;
  double r2 = 0.0;
};

struct CvScore {
  std::vector<CvVariableScore> per_variable;
  double aggregate_mse = 0.0;
  double aggregate_r2 = 0.0;  // mean per-variable R^2
  int folds = 0;
};

CvScore cv_score(const TimeSeriesFrame& frame, const CausalGraph& graph, int folds,
                 const FitOptions& options = {});

// Mean absolute gap between the observed outcome rate inside each natural
// experiment window and the model's interventional prediction for the same
// do(). Low values mean the fitted mechanisms transport to interventions.
struct InterventionErrorOptions {
  std::size_t samples = 256;
  std::uint64_t seed = 0;
};

double intervention_error(const Scm& scm, const TimeSeriesFrame& frame,
                          const std::vector<NaturalExperiment>& experiments,
                          const InterventionErrorOptions& options = {});

}  // namespace causaltwin
