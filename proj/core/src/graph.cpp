#include "causaltwin/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>

#include "causaltwin/error.hpp"

namespace causaltwin {

const char* orientation_name(OrientationSource source) {
  switch (source) {
    case OrientationSource::Temporal: return "Temporal";
    case OrientationSource::Physical: return "Physical";
    case OrientationSource::ControlLogic: return "ControlLogic";
    case OrientationSource::CIStatistics: return "CIStatistics";
  }
  return "CIStatistics";
}

OrientationSource orientation_from_name(const std::string& name) {
  if (name == "Temporal") return OrientationSource::Temporal;
  if (name == "Physical") return OrientationSource::Physical;
  if (name == "ControlLogic") return OrientationSource::ControlLogic;
  if (name == "CIStatistics") return OrientationSource::CIStatistics;
  raise(Errc::ParseError, "unknown orientation source '" + name + "'");
}

int CausalGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void CausalGraph::check() const {
  const int n = static_cast<int>(variables.size());
  std::set<std::tuple<int, int, int>> seen;
  for (const auto& e : edges) {
    require(e.src_var >= 0 && e.src_var < n && e.dst_var >= 0 && e.dst_var < n,
            Errc::InvalidArgument, "edge references an unknown variable");
    require(e.src_lag >= 0 && e.src_lag <= tau, Errc::InvalidArgument,
            "edge lag outside [0, tau]");
    require(!(e.src_var == e.dst_var && e.src_lag == 0), Errc::InvalidArgument,
            "self-loop at lag 0");
    require(seen.insert({e.src_var, e.src_lag, e.dst_var}).second, Errc::InvalidArgument,
            "duplicate edge");
  }
  lag0_topological_order();  // throws on a lag-0 cycle
}

std::vector<Edge> CausalGraph::parents_of(int var) const {
  std::vector<Edge> out;
  for (const auto& e : edges) {
    if (e.dst_var == var) out.push_back(e);
  }
  return out;
}

std::vector<std::vector<int>> CausalGraph::variable_children() const {
  std::vector<std::set<int>> kids(variables.size());
  for (const auto& e : edges) {
    if (e.src_var != e.dst_var) kids[e.src_var].insert(e.dst_var);
  }
  std::vector<std::vector<int>> out(variables.size());
  for (std::size_t i = 0; i < kids.size(); ++i) out[i].assign(kids[i].begin(), kids[i].end());
  return out;
}

std::vector<std::vector<int>> CausalGraph::variable_parents() const {
  std::vector<std::set<int>> pars(variables.size());
  for (const auto& e : edges) {
    if (e.src_var != e.dst_var) pars[e.dst_var].insert(e.src_var);
  }
  std::vector<std::vector<int>> out(variables.size());
  for (std::size_t i = 0; i < pars.size(); ++i) out[i].assign(pars[i].begin(), pars[i].end());
  return out;
}

namespace {

std::vector<int> reach(const std::vector<std::vector<int>>& adjacency, int start) {
  std::vector<char> seen(adjacency.size(), 0);
  std::queue<int> frontier;
  frontier.push(start);
  seen[start] = 1;
  std::vector<int> out;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        out.push_back(v);
        frontier.push(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<int> CausalGraph::ancestors_of(int var) const { return reach(variable_parents(), var); }

std::vector<int> CausalGraph::descendants_of(int var) const {
  return reach(variable_children(), var);
}

std::vector<int> CausalGraph::lag0_topological_order() const {
  const int n = static_cast<int>(variables.size());
  std::vector<std::vector<int>> kids(n);
  std::vector<int> indegree(n, 0);
  for (const auto& e : edges) {
    if (e.src_lag != 0) continue;
    kids[e.src_var].push_back(e.dst_var);
    ++indegree[e.dst_var];
  }
  // Smallest-index-first Kahn ordering keeps the result deterministic.
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int v : kids[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  require(order.size() == static_cast<std::size_t>(n), Errc::InvalidArgument,
          "lag-0 subgraph contains a cycle");
  return order;
}

double CausalGraph::density() const {
  const double n = static_cast<double>(variables.size());
  if (n < 2.0) return 0.0;
  return static_cast<double>(edges.size()) / (n * (n - 1.0) / 2.0);
}

void ConstraintCatalog::check() const {
  for (const auto& [src, dst] : control_edges) {
    require(src == PhysicalClass::Controller, Errc::InvalidArgument,
            "control edges must originate from Controller");
    require(dst == PhysicalClass::Pump || dst == PhysicalClass::Valve, Errc::InvalidArgument,
            "control edges must target Pump or Valve");
  }
  for (const auto& [src, dst] : class_precedence) {
    require(src != dst, Errc::InvalidArgument, "class precedence cannot relate a class to itself");
  }
  // The precedence relation must be acyclic at the class level.
  std::vector<std::pair<int, int>> arcs;
  for (const auto& [src, dst] : class_precedence) {
    arcs.emplace_back(static_cast<int>(src), static_cast<int>(dst));
  }
  constexpr int kClasses = 8;
  std::vector<std::vector<int>> kids(kClasses);
  std::vector<int> indegree(kClasses, 0);
  for (auto [s, d] : arcs) {
    kids[s].push_back(d);
    ++indegree[d];
  }
  std::queue<int> ready;
  for (int c = 0; c < kClasses; ++c) {
    if (indegree[c] == 0) ready.push(c);
  }
  int seen = 0;
  while (!ready.empty()) {
    const int u = ready.front();
    ready.pop();
    ++seen;
    for (int v : kids[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  require(seen == kClasses, Errc::InvalidArgument, "class precedence relation is cyclic");
}

ConstraintCatalog::Coverage ConstraintCatalog::direction_coverage(PhysicalClass src,
                                                                  PhysicalClass dst) const {
  auto listed = [&](PhysicalClass a, PhysicalClass b) {
    for (const auto& [s, d] : class_precedence) {
      if (s == a && d == b) return true;
    }
    for (const auto& [s, d] : control_edges) {
      if (s == a && d == b) return true;
    }
    return false;
  };
  if (listed(src, dst)) return Coverage::Allowed;
  if (listed(dst, src)) return Coverage::Reversed;
  return Coverage::NotMentioned;
}

bool ConstraintCatalog::pair_forbidden(const std::string& src, const std::string& dst) const {
  for (const auto& [s, d] : forbidden_pairs) {
    if (s == src && d == dst) return true;
  }
  return false;
}

}  // namespace causaltwin
