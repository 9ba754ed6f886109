#include "causaltwin/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "causaltwin/error.hpp"
#include "causaltwin/inference.hpp"
#include "causaltwin/rng.hpp"

namespace causaltwin {

namespace {

void require_same_universe(const CausalGraph& a, const CausalGraph& b) {
  require(a.size() == b.size(), Errc::NodeUniverseMismatch, "graphs differ in node count");
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a.variables[i].name == b.variables[i].name, Errc::NodeUniverseMismatch,
            "graphs differ at node " + a.variables[i].name);
  }
}

// Lag-0 adjacencies are unordered (direction tracked separately); lagged
// adjacencies are ordered by time and carry no orientation freedom.
struct Skeleton {
  std::map<std::pair<int, int>, int> lag0;  // pair (min,max) -> src of the edge
  std::map<std::tuple<int, int, int>, int> lagged;  // (src, dst, lag) -> count
};

Skeleton skeleton_of(const CausalGraph& graph) {
  Skeleton s;
  for (const Edge& e : graph.edges) {
    if (e.src_lag == 0) {
      s.lag0[{std::min(e.src_var, e.dst_var), std::max(e.src_var, e.dst_var)}] = e.src_var;
    } else {
      ++s.lagged[{e.src_var, e.dst_var, e.src_lag}];
    }
  }
  return s;
}

double pearson_window(const std::vector<double>& x, const std::vector<double>& y,
                      std::size_t x_off, std::size_t y_off, std::size_t count) {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t t = 0; t < count; ++t) {
    const double a = x[x_off + t];
    const double b = y[y_off + t];
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const double nk = static_cast<double>(count);
  const double cov = sxy / nk - (sx / nk) * (sy / nk);
  const double vx = sxx / nk - (sx / nk) * (sx / nk);
  const double vy = syy / nk - (sy / nk) * (sy / nk);
  if (vx <= 0.0 || vy <= 0.0) return std::nan("");
  return cov / std::sqrt(vx * vy);
}

}  // namespace

ShdBreakdown shd(const CausalGraph& truth, const CausalGraph& discovered) {
  require_same_universe(truth, discovered);
  const Skeleton st = skeleton_of(truth);
  const Skeleton sd = skeleton_of(discovered);

  ShdBreakdown out;
  out.truth_edges = truth.edges.size();
  out.discovered_edges = discovered.edges.size();

  for (const auto& [pair, src] : st.lag0) {
    auto it = sd.lag0.find(pair);
    if (it == sd.lag0.end()) {
      ++out.missing;
    } else if (it->second != src) {
      ++out.misoriented;
    }
  }
  for (const auto& [pair, src] : sd.lag0) {
    if (!st.lag0.contains(pair)) ++out.extra;
  }
  for (const auto& [key, count] : st.lagged) {
    auto it = sd.lagged.find(key);
    const int have = it == sd.lagged.end() ? 0 : it->second;
    if (count > have) out.missing += static_cast<std::size_t>(count - have);
  }
  for (const auto& [key, count] : sd.lagged) {
    auto it = st.lagged.find(key);
    const int have = it == st.lagged.end() ? 0 : it->second;
    if (count > have) out.extra += static_cast<std::size_t>(count - have);
  }

  const std::size_t denom = out.truth_edges + out.discovered_edges;
  out.normalized =
      denom == 0 ? 0.0
                 : static_cast<double>(out.missing + out.extra + out.misoriented) /
                       static_cast<double>(denom);
  return out;
}

PccReport pcc(const CausalGraph& discovered, const ConstraintCatalog& catalog) {
  PccReport out;
  for (const Edge& e : discovered.edges) {
    const VariableMeta& src = discovered.variables[e.src_var];
    const VariableMeta& dst = discovered.variables[e.dst_var];
    if (catalog.pair_forbidden(src.name, dst.name)) {
      ++out.covered;
      continue;
    }
    switch (catalog.direction_coverage(src.physical_class, dst.physical_class)) {
      case ConstraintCatalog::Coverage::Allowed:
        ++out.covered;
        ++out.compliant;
        break;
      case ConstraintCatalog::Coverage::Reversed:
        ++out.covered;
        break;
      case ConstraintCatalog::Coverage::NotMentioned:
        break;
    }
  }
  out.vacuous = out.covered == 0;
  out.value = out.vacuous ? 1.0
                          : static_cast<double>(out.compliant) /
                                static_cast<double>(out.covered);
  return out;
}

TccReport tcc(const CausalGraph& discovered, const TimeSeriesFrame& frame) {
  const int tau = std::max(discovered.tau, 1);
  require(frame.rows() >= static_cast<std::size_t>(8 * (tau + 1)), Errc::SeriesTooShort,
          "frame too short for lag correlation");
  require(frame.cols() == discovered.size(), Errc::NodeUniverseMismatch,
          "frame and graph differ in variables");

  TccReport out;
  std::vector<std::vector<double>> columns(frame.cols());
  for (std::size_t i = 0; i < frame.cols(); ++i) columns[i] = frame.column(i);

  for (const Edge& e : discovered.edges) {
    const std::vector<double>& cause = columns[e.src_var];
    const std::vector<double>& effect = columns[e.dst_var];
    const std::size_t rows = frame.rows();

    // corr(cause(t - lag), effect(t)); ties go to the later lag so an exactly
    // symmetric profile counts as compliant.
    double best = -1.0;
    int best_lag = -tau - 1;
    bool any = false;
    for (int lag = -tau; lag <= tau; ++lag) {
      const std::size_t shift = static_cast<std::size_t>(std::abs(lag));
      const std::size_t count = rows - shift;
      const std::size_t cause_off = lag >= 0 ? 0 : shift;
      const std::size_t effect_off = lag >= 0 ? shift : 0;
      const double r = pearson_window(cause, effect, cause_off, effect_off, count);
      if (std::isnan(r)) continue;
      any = true;
      if (std::abs(r) >= best) {
        best = std::abs(r);
        best_lag = lag;
      }
    }
    if (!any) continue;  // constant column, nothing to verify
    ++out.checked;
    if (best_lag >= 0) ++out.compliant;
  }
  out.value = out.checked == 0
                  ? 1.0
                  : static_cast<double>(out.compliant) / static_cast<double>(out.checked);
  return out;
}

CvScore cv_score(const TimeSeriesFrame& frame, const CausalGraph& graph, int folds,
                 const FitOptions& options) {
  require(folds >= 2, Errc::InvalidArgument, "cross-validation needs at least 2 folds");
  graph.check();
  require(frame.cols() == graph.size(), Errc::NodeUniverseMismatch,
          "frame and graph differ in variables");

  const std::size_t blocks = static_cast<std::size_t>(folds) + 1;
  const std::size_t block_len = frame.rows() / blocks;
  require(block_len > static_cast<std::size_t>(graph.tau) + 20, Errc::SeriesTooShort,
          "folds leave too few rows per block");

  // Score continuous variables that have a mechanism to validate.
  std::vector<int> scored;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph.variables[i].kind != VariableKind::ContinuousSensor) continue;
    if (!graph.parents_of(static_cast<int>(i)).empty()) scored.push_back(static_cast<int>(i));
  }

  struct Acc {
    double sse = 0.0, sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
  };
  std::vector<Acc> acc(scored.size());

  for (int fold = 1; fold <= folds; ++fold) {
    const std::size_t train_end = static_cast<std::size_t>(fold) * block_len;
    const std::size_t test_end =
        fold == folds ? frame.rows() : train_end + block_len;
    TimeSeriesFrame train = slice_rows(frame, 0, train_end);
    const Scm scm = fit(augment(train, graph.tau), graph, options);

    std::vector<double> pv;
    for (std::size_t s = 0; s < scored.size(); ++s) {
      const int var = scored[s];
      const StructuralEquation& eq = scm.equations[var];
      for (std::size_t t = train_end; t < test_end; ++t) {
        bool complete = !frame.is_missing(t, var);
        pv.clear();
        for (const ColumnKey& key : eq.parents) {
          const std::size_t row = t - static_cast<std::size_t>(key.lag);
          if (frame.is_missing(row, key.var)) {
            complete = false;
            break;
          }
          pv.push_back(frame.at(row, key.var));
        }
        if (!complete) continue;
        const double y = frame.at(t, var);
        const double err = y - scm.mechanism_mean(var, pv.data());
        acc[s].sse += err * err;
        acc[s].sum += y;
        acc[s].sumsq += y * y;
        ++acc[s].count;
      }
    }
  }

  CvScore out;
  out.folds = folds;
  double mse_total = 0.0, r2_total = 0.0;
  for (std::size_t s = 0; s < scored.size(); ++s) {
    const Acc& a = acc[s];
    require(a.count > 0, Errc::SeriesTooShort, "no scorable test rows");
    const double n = static_cast<double>(a.count);
    const double mse = a.sse / n;
    const double sst = a.sumsq - a.sum * a.sum / n;
    const double r2 = sst > 0.0 ? 1.0 - a.sse / sst : (a.sse == 0.0 ? 1.0 : 0.0);
    out.per_variable.push_back({scored[s], mse, r2});
    mse_total += mse;
    r2_total += r2;
  }
  if (!out.per_variable.empty()) {
    out.aggregate_mse = mse_total / static_cast<double>(out.per_variable.size());
    out.aggregate_r2 = r2_total / static_cast<double>(out.per_variable.size());
  }
  return out;
}

double intervention_error(const Scm& scm, const TimeSeriesFrame& frame,
                          const std::vector<NaturalExperiment>& experiments,
                          const InterventionErrorOptions& options) {
  require(!experiments.empty(), Errc::NoExperiments, "no natural experiments supplied");
  const std::size_t lag = static_cast<std::size_t>(scm.max_lag());
  const std::size_t n = scm.size();

  double total = 0.0;
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    const NaturalExperiment& ex = experiments[e];
    require(ex.begin >= lag && ex.end < frame.rows() && ex.begin <= ex.end,
            Errc::InvalidArgument, "experiment window out of range");

    double observed = 0.0;
    for (std::size_t t = ex.begin; t <= ex.end; ++t) observed += frame.at(t, ex.outcome);
    observed /= static_cast<double>(ex.end - ex.begin + 1);

    std::vector<double> initial(lag * n);
    for (std::size_t r = 0; r < lag; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        initial[r * n + i] = frame.at(ex.begin - lag + r, i);
      }
    }
    Intervention force{ex.treatment, Intervention::Kind::Force, ex.forced_value, 0};
    const double predicted =
        do_expectation(scm, {force}, initial, ex.end - ex.begin + 1, ex.outcome,
                       derive_seed(options.seed, 0x1e0, e), options.samples);
    total += std::abs(observed - predicted);
  }
  return total / static_cast<double>(experiments.size());
}

}  // namespace causaltwin
