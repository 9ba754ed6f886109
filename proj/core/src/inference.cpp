#include "causaltwin/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <queue>

#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/stats.hpp"

namespace causaltwin {
namespace {

// Topological order of the lag-0 parent relation among the equations.
std::vector<int> lag0_order(const Scm& scm) {
  const int n = static_cast<int>(scm.size());
  std::vector<std::vector<int>> children(n);
  std::vector<int> indegree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const ColumnKey& key : scm.equations[i].parents) {
      if (key.lag == 0) {
        children[key.var].push_back(i);
        ++indegree[i];
      }
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  require(static_cast<int>(order.size()) == n, Errc::InvalidArgument,
          "model has an instantaneous cycle");
  return order;
}

// Per-variable intervention schedule: at step t the latest-starting entry
// with start_step <= t wins; equal starts resolve to the later list entry.
struct Schedule {
  std::vector<std::vector<const Intervention*>> by_var;  // sorted by start_step, stable

  explicit Schedule(std::size_t n, const std::vector<Intervention>& interventions) : by_var(n) {
    for (const Intervention& iv : interventions) {
      require(iv.var >= 0 && static_cast<std::size_t>(iv.var) < n, Errc::InvalidArgument,
              "intervention variable out of range");
      by_var[iv.var].push_back(&iv);
    }
    for (auto& list : by_var) {
      std::stable_sort(list.begin(), list.end(), [](const Intervention* a, const Intervention* b) {
        return a->start_step < b->start_step;
      });
    }
  }

  const Intervention* active(int var, std::size_t step) const {
    const Intervention* hit = nullptr;
    for (const Intervention* iv : by_var[var]) {
      if (iv->start_step > step) break;
      hit = iv;
    }
    return hit;
  }
};

}  // namespace

Trajectory simulate_do(const Scm& scm, const std::vector<Intervention>& interventions,
                       const std::vector<double>& initial_window, std::size_t horizon,
                       const Exogenous& exogenous) {
  const std::size_t n = scm.size();
  const int lag = scm.max_lag();
  require(initial_window.size() == static_cast<std::size_t>(lag) * n, Errc::InvalidArgument,
          "initial window must hold max_lag rows");
  if (exogenous.mode == Exogenous::Mode::Fixed) {
    require(exogenous.residuals != nullptr, Errc::InvalidArgument, "fixed mode needs residuals");
    require(exogenous.residuals->cols == n &&
                exogenous.offset + horizon <= exogenous.residuals->rows,
            Errc::InvalidArgument, "residual matrix does not cover the horizon");
  }

  const std::vector<int> order = lag0_order(scm);
  const Schedule schedule(n, interventions);

  Trajectory out;
  out.rows = horizon;
  out.cols = n;
  out.values.assign(horizon * n, 0.0);

  Rng rng(exogenous.seed);
  std::vector<double> noise(n, 0.0);
  std::vector<double> parent_values;

  for (std::size_t t = 0; t < horizon; ++t) {
    if (exogenous.mode == Exogenous::Mode::Draw) {
      // One draw per mechanism per step in variable order, regardless of
      // interventions, so runs that differ only in their interventions share
      // exogenous noise.
      for (std::size_t i = 0; i < n; ++i) {
        noise[i] = scm.variables[i].kind == VariableKind::BinaryActuator ? rng.uniform()
                                                                         : rng.normal();
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        require(exogenous.residuals->is_valid(exogenous.offset + t, i), Errc::MissingEvidence,
                "fixed residual cell is not valid");
        noise[i] = exogenous.residuals->at(exogenous.offset + t, i);
      }
    }

    for (int i : order) {
      const StructuralEquation& eq = scm.equations[i];
      parent_values.resize(eq.parents.size());
      for (std::size_t p = 0; p < eq.parents.size(); ++p) {
        const ColumnKey key = eq.parents[p];
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - key.lag;
        parent_values[p] = src >= 0 ? out.at(static_cast<std::size_t>(src), key.var)
                                    : initial_window[(src + lag) * static_cast<std::ptrdiff_t>(n) +
                                                     key.var];
      }

      const Intervention* iv = schedule.active(i, t);
      double value = 0.0;
      if (iv != nullptr && iv->kind == Intervention::Kind::Force) {
        value = iv->value;
      } else if (eq.form == StructuralEquation::Form::Logistic) {
        const double p1 = scm.mechanism_probability(i, parent_values.data());
        if (iv != nullptr) {
          value = p1 >= 0.5 ? 1.0 : 0.0;  // ClampToMechanism
        } else {
          value = noise[i] <= p1 ? 1.0 : 0.0;
        }
      } else {
        const double mean = scm.mechanism_mean(i, parent_values.data());
        if (iv != nullptr) {
          value = mean;  // ClampToMechanism
        } else if (exogenous.mode == Exogenous::Mode::Fixed) {
          value = mean + noise[i];
        } else {
          value = mean + scm.sigma_raw(i) * noise[i];
        }
      }
      out.set(t, i, value);
    }
  }
  return out;
}

double do_expectation(const Scm& scm, const std::vector<Intervention>& interventions,
                      const std::vector<double>& initial_window, std::size_t horizon,
                      int target, std::uint64_t seed, std::size_t samples) {
  require(horizon > 0 && samples > 0, Errc::InvalidArgument, "need a positive horizon and samples");
  require(target >= 0 && static_cast<std::size_t>(target) < scm.size(), Errc::TargetMissing,
          "target variable out of range");
  double total = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Exogenous exo;
    exo.mode = Exogenous::Mode::Draw;
    exo.seed = derive_seed(seed, 0x51, s);
    const Trajectory traj = simulate_do(scm, interventions, initial_window, horizon, exo);
    for (std::size_t t = 0; t < horizon; ++t) total += traj.at(t, target);
  }
  return total / (static_cast<double>(samples) * static_cast<double>(horizon));
}

namespace {

// Variable-level adjacency with declared confounders expanded as synthetic
// common causes appended after the observed nodes.
struct Adjacency {
  std::size_t observed = 0;
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<int>> children;

  std::size_t size() const { return parents.size(); }
};

Adjacency build_adjacency(const CausalGraph& graph) {
  Adjacency adj;
  adj.observed = graph.size();
  const std::size_t total = adj.observed + graph.latent_pairs.size();
  adj.parents.resize(total);
  adj.children.resize(total);
  const auto var_parents = graph.variable_parents();
  for (std::size_t v = 0; v < adj.observed; ++v) {
    for (int p : var_parents[v]) {
      adj.parents[v].push_back(p);
      adj.children[p].push_back(static_cast<int>(v));
    }
  }
  for (std::size_t k = 0; k < graph.latent_pairs.size(); ++k) {
    const int latent = static_cast<int>(adj.observed + k);
    const auto [a, b] = graph.latent_pairs[k];
    adj.children[latent] = {a, b};
    adj.parents[a].push_back(latent);
    adj.parents[b].push_back(latent);
  }
  return adj;
}

void drop_out_edges(Adjacency& adj, const std::vector<int>& nodes) {
  for (int v : nodes) {
    for (int c : adj.children[v]) {
      auto& ps = adj.parents[c];
      ps.erase(std::remove(ps.begin(), ps.end(), v), ps.end());
    }
    adj.children[v].clear();
  }
}

bool projection_acyclic(const Adjacency& adj) {
  std::vector<int> indegree(adj.size(), 0);
  for (std::size_t v = 0; v < adj.size(); ++v) indegree[v] = static_cast<int>(adj.parents[v].size());
  std::deque<int> ready;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (indegree[v] == 0) ready.push_back(static_cast<int>(v));
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop_front();
    ++seen;
    for (int c : adj.children[v]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  return seen == adj.size();
}

// Reachability under d-connection: a ball starting at the sources travels
// child-to-parent ("up") and parent-to-child ("down"); colliders pass it only
// when they have conditioned descendants, chains and forks only when
// unconditioned.
std::vector<char> d_reachable(const Adjacency& adj, const std::vector<int>& sources,
                              const std::vector<char>& conditioned) {
  const std::size_t total = adj.size();
  std::vector<char> in_ancestor(total, 0);
  {
    std::deque<int> frontier;
    for (std::size_t v = 0; v < total; ++v) {
      if (conditioned[v]) {
        in_ancestor[v] = 1;
        frontier.push_back(static_cast<int>(v));
      }
    }
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop_front();
      for (int p : adj.parents[v]) {
        if (!in_ancestor[p]) {
          in_ancestor[p] = 1;
          frontier.push_back(p);
        }
      }
    }
  }

  std::vector<char> reached(total, 0);
  std::vector<char> visited_up(total, 0);
  std::vector<char> visited_down(total, 0);
  std::deque<std::pair<int, bool>> frontier;  // (node, arrived_from_child)
  for (int s : sources) frontier.emplace_back(s, true);
  while (!frontier.empty()) {
    const auto [v, from_child] = frontier.front();
    frontier.pop_front();
    auto& visited = from_child ? visited_up : visited_down;
    if (visited[v]) continue;
    visited[v] = 1;
    if (!conditioned[v]) reached[v] = 1;
    if (from_child) {
      if (!conditioned[v]) {
        for (int p : adj.parents[v]) frontier.emplace_back(p, true);
        for (int c : adj.children[v]) frontier.emplace_back(c, false);
      }
    } else {
      if (!conditioned[v]) {
        for (int c : adj.children[v]) frontier.emplace_back(c, false);
      }
      if (in_ancestor[v]) {
        for (int p : adj.parents[v]) frontier.emplace_back(p, true);
      }
    }
  }
  return reached;
}

bool d_separated_in(const Adjacency& adj, const std::vector<int>& xs, const std::vector<int>& ys,
                    const std::vector<int>& given) {
  std::vector<char> conditioned(adj.size(), 0);
  for (int g : given) conditioned[g] = 1;
  const std::vector<char> reached = d_reachable(adj, xs, conditioned);
  for (int y : ys) {
    if (reached[y]) return false;
  }
  return true;
}

void check_nodes(const CausalGraph& graph, const std::vector<int>& nodes) {
  for (int v : nodes) {
    require(v >= 0 && static_cast<std::size_t>(v) < graph.size(), Errc::InvalidArgument,
            "variable index out of range");
  }
}

}  // namespace

bool d_separated(const CausalGraph& graph, const std::vector<int>& xs, const std::vector<int>& ys,
                 const std::vector<int>& given) {
  check_nodes(graph, xs);
  check_nodes(graph, ys);
  check_nodes(graph, given);
  const Adjacency adj = build_adjacency(graph);
  require(projection_acyclic(adj), Errc::InvalidArgument,
          "identification requires an acyclic variable-level graph");
  return d_separated_in(adj, xs, ys, given);
}

bool backdoor_valid(const CausalGraph& graph, int treatment, int outcome,
                    const std::vector<int>& adjustment) {
  check_nodes(graph, {treatment, outcome});
  check_nodes(graph, adjustment);
  const Adjacency adj = build_adjacency(graph);
  require(projection_acyclic(adj), Errc::InvalidArgument,
          "identification requires an acyclic variable-level graph");
  const std::vector<int> descendants = graph.descendants_of(treatment);
  for (int s : adjustment) {
    if (std::find(descendants.begin(), descendants.end(), s) != descendants.end()) return false;
    if (s == treatment || s == outcome) return false;
  }
  Adjacency cut = adj;
  drop_out_edges(cut, {treatment});
  return d_separated_in(cut, {treatment}, {outcome}, adjustment);
}

namespace {

bool frontdoor_valid(const Adjacency& adj, const CausalGraph& graph, int treatment, int outcome,
                     const std::vector<int>& mediators) {
  // (i) every directed treatment -> outcome path passes through a mediator.
  {
    std::vector<char> blocked(adj.size(), 0);
    for (int m : mediators) blocked[m] = 1;
    std::vector<char> seen(adj.size(), 0);
    std::deque<int> frontier{treatment};
    seen[treatment] = 1;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop_front();
      for (int c : adj.children[v]) {
        if (blocked[c] || seen[c]) continue;
        if (c == outcome) return false;
        seen[c] = 1;
        frontier.push_back(c);
      }
    }
  }
  // (ii) no open backdoor path from the treatment to any mediator.
  {
    Adjacency cut = adj;
    drop_out_edges(cut, {treatment});
    if (!d_separated_in(cut, {treatment}, mediators, {})) return false;
  }
  // (iii) the treatment blocks every backdoor path from the mediators to the
  // outcome; mediators must not be ancestors of the treatment.
  {
    const std::vector<int> ancestors = graph.ancestors_of(treatment);
    for (int m : mediators) {
      if (std::find(ancestors.begin(), ancestors.end(), m) != ancestors.end()) return false;
    }
    Adjacency cut = adj;
    drop_out_edges(cut, mediators);
    if (!d_separated_in(cut, mediators, {outcome}, {treatment})) return false;
  }
  return true;
}

}  // namespace

IdentificationResult find_adjustment_set(const CausalGraph& graph, int treatment, int outcome) {
  check_nodes(graph, {treatment, outcome});
  require(treatment != outcome, Errc::InvalidArgument, "treatment and outcome must differ");
  const Adjacency adj = build_adjacency(graph);
  require(projection_acyclic(adj), Errc::InvalidArgument,
          "identification requires an acyclic variable-level graph");

  IdentificationResult result;

  std::vector<int> parents;
  for (int p : graph.variable_parents()[treatment]) parents.push_back(p);
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
  if (backdoor_valid(graph, treatment, outcome, parents)) {
    result.strategy = IdentificationResult::Strategy::Backdoor;
    result.adjustment_set = std::move(parents);
    return result;
  }

  // Candidate mediators: observed nodes strictly between treatment and
  // outcome on directed paths.
  const std::vector<int> desc = graph.descendants_of(treatment);
  const std::vector<int> anc = graph.ancestors_of(outcome);
  std::vector<int> candidates;
  for (int v : desc) {
    if (v == outcome || v == treatment) continue;
    if (std::find(anc.begin(), anc.end(), v) != anc.end()) candidates.push_back(v);
  }
  std::sort(candidates.begin(), candidates.end());

  const std::size_t m = candidates.size();
  for (std::size_t size = 1; size <= std::min<std::size_t>(3, m); ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      std::vector<int> mediators(size);
      for (std::size_t i = 0; i < size; ++i) mediators[i] = candidates[pick[i]];
      if (frontdoor_valid(adj, graph, treatment, outcome, mediators)) {
        result.strategy = IdentificationResult::Strategy::Frontdoor;
        result.mediators = std::move(mediators);
        return result;
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == m - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return result;
}

namespace {

bool is_binary(const TimeSeriesFrame& data, int var) {
  return data.meta()[var].kind == VariableKind::BinaryActuator;
}

bool row_complete(const TimeSeriesFrame& data, std::size_t t, int treatment, int outcome,
                  const std::vector<int>& others) {
  if (data.is_missing(t, treatment) || data.is_missing(t, outcome)) return false;
  for (int v : others) {
    if (data.is_missing(t, v)) return false;
  }
  return true;
}

}  // namespace

AdjustmentEstimate backdoor_effect(const TimeSeriesFrame& data, int treatment, int outcome,
                                   const std::vector<int>& adjustment, double x) {
  require(treatment >= 0 && static_cast<std::size_t>(treatment) < data.cols() && outcome >= 0 &&
              static_cast<std::size_t>(outcome) < data.cols(),
          Errc::InvalidArgument, "variable index out of range");
  for (int v : adjustment) {
    require(v >= 0 && static_cast<std::size_t>(v) < data.cols(), Errc::InvalidArgument,
            "adjustment index out of range");
    require(v != treatment && v != outcome, Errc::InvalidArgument,
            "adjustment set must exclude treatment and outcome");
  }

  AdjustmentEstimate est;
  bool stratify = is_binary(data, treatment);
  for (int v : adjustment) stratify = stratify && is_binary(data, v);

  if (stratify) {
    // Exact stratification over the joint adjustment values.
    struct Stratum {
      std::size_t total = 0;
      std::size_t arm = 0;
      double arm_sum = 0.0;
    };
    std::map<std::uint64_t, Stratum> strata;
    require(adjustment.size() < 64, Errc::InvalidArgument, "adjustment set too large to stratify");
    for (std::size_t t = 0; t < data.rows(); ++t) {
      if (!row_complete(data, t, treatment, outcome, adjustment)) continue;
      std::uint64_t key = 0;
      for (std::size_t j = 0; j < adjustment.size(); ++j) {
        if (data.at(t, adjustment[j]) != 0.0) key |= std::uint64_t{1} << j;
      }
      Stratum& s = strata[key];
      ++s.total;
      if (data.at(t, treatment) == x) {
        ++s.arm;
        s.arm_sum += data.at(t, outcome);
      }
    }
    require(!strata.empty(), Errc::InsufficientData, "no complete rows for adjustment");
    double weighted = 0.0;
    std::size_t kept_weight = 0;
    for (const auto& [key, s] : strata) {
      (void)key;
      if (s.arm == 0) {
        ++est.empty_strata;
        continue;
      }
      weighted += (s.arm_sum / static_cast<double>(s.arm)) * static_cast<double>(s.total);
      kept_weight += s.total;
    }
    require(kept_weight > 0, Errc::InsufficientData, "every stratum is empty at the treatment arm");
    est.value = weighted / static_cast<double>(kept_weight);
    return est;
  }

  // Regression adjustment: linear outcome model, averaged over the empirical
  // adjustment distribution.
  est.regression_path = true;
  std::vector<double> ones, tx, y;
  std::vector<std::vector<double>> zs(adjustment.size());
  for (std::size_t t = 0; t < data.rows(); ++t) {
    if (!row_complete(data, t, treatment, outcome, adjustment)) continue;
    ones.push_back(1.0);
    tx.push_back(data.at(t, treatment));
    y.push_back(data.at(t, outcome));
    for (std::size_t j = 0; j < adjustment.size(); ++j) zs[j].push_back(data.at(t, adjustment[j]));
  }
  require(y.size() >= adjustment.size() + 3, Errc::InsufficientData,
          "too few complete rows for regression adjustment");
  std::vector<const double*> columns{ones.data(), tx.data()};
  for (const auto& z : zs) columns.push_back(z.data());
  const LeastSquaresResult ls = least_squares(columns, y.data(), y.size());
  require(ls.ok, Errc::InsufficientData, "regression adjustment design is degenerate");
  double value = ls.beta[0] + ls.beta[1] * x;
  for (std::size_t j = 0; j < adjustment.size(); ++j) value += ls.beta[2 + j] * mean_of(zs[j]);
  est.value = value;
  return est;
}

AdjustmentEstimate frontdoor_effect(const TimeSeriesFrame& data, int treatment, int outcome,
                                    const std::vector<int>& mediators, double x) {
  require(!mediators.empty(), Errc::InvalidArgument, "front-door needs at least one mediator");
  require(is_binary(data, treatment), Errc::InvalidArgument, "front-door needs a binary treatment");
  require(mediators.size() < 64, Errc::InvalidArgument, "mediator set too large");
  for (int m : mediators) {
    require(is_binary(data, m), Errc::InvalidArgument, "front-door needs binary mediators");
    require(m != treatment && m != outcome, Errc::InvalidArgument,
            "mediators must exclude treatment and outcome");
  }

  // Empirical pieces of sum_z P(z | x) * sum_x' E[y | x', z] P(x').
  struct Cell {
    std::size_t count = 0;
    double sum = 0.0;
  };
  std::map<std::uint64_t, Cell> z_given_x;        // rows at the requested arm
  std::map<std::uint64_t, Cell> outcome_by_xz[2];  // index = treatment value
  std::size_t arm_rows[2] = {0, 0};
  std::size_t total_rows = 0;

  for (std::size_t t = 0; t < data.rows(); ++t) {
    if (!row_complete(data, t, treatment, outcome, mediators)) continue;
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < mediators.size(); ++j) {
      if (data.at(t, mediators[j]) != 0.0) key |= std::uint64_t{1} << j;
    }
    const int arm = data.at(t, treatment) != 0.0 ? 1 : 0;
    ++total_rows;
    ++arm_rows[arm];
    Cell& oc = outcome_by_xz[arm][key];
    ++oc.count;
    oc.sum += data.at(t, outcome);
    if (data.at(t, treatment) == x) ++z_given_x[key].count;
  }

  const int want = x != 0.0 ? 1 : 0;
  require(arm_rows[want] > 0, Errc::InsufficientData, "no rows at the requested treatment arm");
  const double p_arm[2] = {static_cast<double>(arm_rows[0]) / static_cast<double>(total_rows),
                           static_cast<double>(arm_rows[1]) / static_cast<double>(total_rows)};

  AdjustmentEstimate est;
  double value = 0.0;
  double kept_mass = 0.0;
  for (const auto& [key, cell] : z_given_x) {
    const double pz = static_cast<double>(cell.count) / static_cast<double>(arm_rows[want]);
    double inner = 0.0;
    double inner_mass = 0.0;
    for (int arm = 0; arm < 2; ++arm) {
      const auto it = outcome_by_xz[arm].find(key);
      if (it == outcome_by_xz[arm].end() || it->second.count == 0) {
        ++est.empty_strata;
        continue;
      }
      inner += (it->second.sum / static_cast<double>(it->second.count)) * p_arm[arm];
      inner_mass += p_arm[arm];
    }
    if (inner_mass == 0.0) {
      ++est.empty_strata;
      continue;
    }
    value += pz * (inner / inner_mass);
    kept_mass += pz;
  }
  require(kept_mass > 0.0, Errc::InsufficientData, "every mediator stratum is empty");
  est.value = value / kept_mass;
  return est;
}

namespace {

std::vector<Intervention> shift_to_simulation(const std::vector<Intervention>& interventions,
                                              int lag) {
  // Evidence rows inside the lag window are abduction context; interventions
  // aimed there take effect at the first simulated step.
  std::vector<Intervention> shifted = interventions;
  for (Intervention& iv : shifted) {
    iv.start_step = iv.start_step <= static_cast<std::size_t>(lag)
                        ? 0
                        : iv.start_step - static_cast<std::size_t>(lag);
  }
  return shifted;
}

Trajectory replay(const Scm& scm, const TimeSeriesFrame& evidence,
                  const std::vector<Intervention>& interventions, const ResidualMatrix& res) {
  const std::size_t n = scm.size();
  const int lag = scm.max_lag();
  std::vector<double> initial(static_cast<std::size_t>(lag) * n);
  for (int t = 0; t < lag; ++t) {
    for (std::size_t i = 0; i < n; ++i) initial[t * n + i] = evidence.at(t, i);
  }
  Exogenous exo;
  exo.mode = Exogenous::Mode::Fixed;
  exo.residuals = &res;
  exo.offset = static_cast<std::size_t>(lag);
  const std::size_t horizon = evidence.rows() - static_cast<std::size_t>(lag);
  const Trajectory sim =
      simulate_do(scm, shift_to_simulation(interventions, lag), initial, horizon, exo);

  Trajectory out;
  out.rows = evidence.rows();
  out.cols = n;
  out.values.resize(out.rows * n);
  for (int t = 0; t < lag; ++t) {
    for (std::size_t i = 0; i < n; ++i) out.set(t, i, evidence.at(t, i));
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) out.set(t + lag, i, sim.at(t, i));
  }
  return out;
}

void check_evidence(const Scm& scm, const TimeSeriesFrame& evidence) {
  require(evidence.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "evidence columns do not match the model");
  require(evidence.rows() > static_cast<std::size_t>(scm.max_lag()), Errc::SeriesTooShort,
          "evidence must extend past the lag window");
  require(!evidence.has_missing(), Errc::MissingEvidence, "evidence window has missing cells");
}

}  // namespace

Trajectory counterfactual(const Scm& scm, const TimeSeriesFrame& evidence,
                          const CounterfactualQuery& query) {
  check_evidence(scm, evidence);
  const ResidualMatrix res = residuals(scm, evidence);
  return replay(scm, evidence, query.interventions, res);
}

std::vector<Trajectory> counterfactual_sampled(const Scm& scm, const TimeSeriesFrame& evidence,
                                               const CounterfactualQuery& query,
                                               std::size_t samples, std::uint64_t seed) {
  check_evidence(scm, evidence);
  require(samples > 0, Errc::InvalidArgument, "need at least one sample");
  const std::size_t n = scm.size();
  const int lag = scm.max_lag();
  const ResidualMatrix base = residuals(scm, evidence);

  // Factual activation probabilities for binary mechanisms; each sample draws
  // the latent uniformly inside the outcome-consistent interval
  // ([0, p] for outcome 1, (p, 1] for outcome 0).
  std::vector<int> binaries;
  for (std::size_t i = 0; i < n; ++i) {
    if (scm.variables[i].kind == VariableKind::BinaryActuator) binaries.push_back(static_cast<int>(i));
  }
  std::vector<double> p_obs(evidence.rows() * n, 0.0);
  std::vector<double> parent_values;
  for (std::size_t t = lag; t < evidence.rows(); ++t) {
    for (int i : binaries) {
      const StructuralEquation& eq = scm.equations[i];
      parent_values.resize(eq.parents.size());
      for (std::size_t p = 0; p < eq.parents.size(); ++p) {
        parent_values[p] = evidence.at(t - eq.parents[p].lag, eq.parents[p].var);
      }
      p_obs[t * n + i] = scm.mechanism_probability(i, parent_values.data());
    }
  }

  std::vector<Trajectory> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, 0x1a7e, s));
    ResidualMatrix res = base;
    for (std::size_t t = lag; t < evidence.rows(); ++t) {
      for (int i : binaries) {
        const double p = p_obs[t * n + i];
        const double u = rng.uniform();
        const bool one = evidence.at(t, i) != 0.0;
        res.values[t * n + i] = one ? u * p : p + u * (1.0 - p);
      }
    }
    out.push_back(replay(scm, evidence, query.interventions, res));
  }
  return out;
}

}  // namespace causaltwin
