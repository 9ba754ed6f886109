#pragma once

#include <cstdint>
#include <vector>

#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/tdmi.hpp"

namespace causaltwin {

struct CiResult {
  double partial_correlation = 0.0;
  double p_value = 1.0;
  bool independent = false;
  // Conditioners dropped because the conditioning set was collinear.
  int dropped_conditioners = 0;
  std::size_t rows_used = 0;
};

// Partial-correlation independence test between two augmented columns given
// a conditioning set, via least-squares residualization and the Fisher z
// transform. independent holds when p >= alpha. A collinear conditioning set
// sheds its latest-added member and retries.
CiResult ci_test(const AugmentedFrame& aug, ColumnKey a, ColumnKey b,
                 std::vector<ColumnKey> conditioning, double alpha = 0.05);

struct DiscoveryOptions {
  int k = 10;           // per-target candidate cap
  double alpha = 0.05;  // CI significance level
  int bins = 16;
  DeltaPolicy delta{};
  std::uint64_t seed = 0;
  std::size_t max_tdmi_rows = 8000;
  // Hard-filters candidates that contradict the catalog instead of only
  // using it for orientation.
  bool enforce_catalog = false;
};

struct DiscoveryStats {
  std::size_t tdmi_pairs = 0;
  std::size_t ci_tests = 0;
  std::size_t max_ci_tests_per_target = 0;
  std::size_t singular_retries = 0;
  std::size_t lag0_cycle_deletions = 0;
  double seconds = 0.0;
};

// Two-phase local structure search: TDMI screening per target, then
// PC-stable skeleton pruning over each target's candidate set with
// conditioning sets of ascending size, then orientation (Temporal >
// Physical > ControlLogic > CIStatistics) and lag-0 cycle resolution by
// deleting the weakest edge.
CausalGraph discover(const AugmentedFrame& aug, const ConstraintCatalog& catalog,
                     const DiscoveryOptions& options, DiscoveryStats* stats = nullptr);

}  // namespace causaltwin
