#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "causaltwin/types.hpp"

namespace causaltwin {

// Why an edge points the way it does, in decreasing precedence: lagged edges
// are fixed by time order, then physics catalog entries, then control-loop
// declarations, and finally the statistics of the local tests.
enum class OrientationSource { Temporal, Physical, ControlLogic, CIStatistics };

const char* orientation_name(OrientationSource source);
OrientationSource orientation_from_name(const std::string& name);

struct Edge {
  int src_var = 0;
  int src_lag = 0;
  int dst_var = 0;  // always at lag 0
  double strength = 0.0;
  OrientationSource orientation_source = OrientationSource::Temporal;
  bool operator==(const Edge&) const = default;
};

// Directed lagged graph over (variable, lag) nodes with all edges pointing
// into lag-0 targets. The lag-0 subgraph is kept acyclic; no self-loop at
// lag 0 is representable by construction checks.
struct CausalGraph {
  std::vector<VariableMeta> variables;
  int tau = 0;
  std::vector<Edge> edges;
  // Declared unobserved confounders (bidirected pairs) for identification
  // analysis. Discovery never emits these.
  std::vector<std::pair<int, int>> latent_pairs;

  std::size_t size() const { return variables.size(); }
  int index_of(const std::string& name) const;
  void check() const;  // validates indices, lags, lag-0 acyclicity

  std::vector<Edge> parents_of(int var) const;
  // Variable-level projection: u -> v when any lag of u feeds v.
  std::vector<std::vector<int>> variable_children() const;
  std::vector<std::vector<int>> variable_parents() const;
  std::vector<int> ancestors_of(int var) const;    // excludes var
  std::vector<int> descendants_of(int var) const;  // excludes var
  // Topological order of the lag-0 subgraph (all variables appear).
  std::vector<int> lag0_topological_order() const;

  double density() const;  // |edges| / (n * (n - 1) / 2)
};

// Physics and control-logic prior knowledge.
//  - class_precedence: directed class pairs giving the allowed causal
//    direction between two classes (e.g. Flow before Level). The class-level
//    relation must be acyclic. At lag 0 the reverse direction is forbidden.
//  - control_edges: class pairs driven by control logic (source must be
//    Controller); same direction semantics as precedence.
//  - forbidden_pairs: named variable pairs that must never be connected
//    src -> dst at any lag.
struct ConstraintCatalog {
  std::vector<std::pair<PhysicalClass, PhysicalClass>> class_precedence;
  std::vector<std::pair<PhysicalClass, PhysicalClass>> control_edges;
  std::vector<std::pair<std::string, std::string>> forbidden_pairs;

  bool empty() const {
    return class_precedence.empty() && control_edges.empty() && forbidden_pairs.empty();
  }
  void check() const;

  enum class Coverage { NotMentioned, Allowed, Reversed };
  // Looks up the directed class pair in precedence and control lists.
  Coverage direction_coverage(PhysicalClass src, PhysicalClass dst) const;
  bool pair_forbidden(const std::string& src, const std::string& dst) const;
};

}  // namespace causaltwin
