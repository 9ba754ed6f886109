#include "causaltwin/scm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "causaltwin/error.hpp"
#include "causaltwin/stats.hpp"

namespace causaltwin {

namespace {

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a_u64(std::uint64_t hash, std::uint64_t v) { return fnv1a(hash, &v, sizeof v); }

}  // namespace

std::uint64_t structure_hash(const CausalGraph& graph) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_u64(h, graph.variables.size());
  h = fnv1a_u64(h, static_cast<std::uint64_t>(graph.tau));
  for (const auto& v : graph.variables) {
    h = fnv1a(h, v.name.data(), v.name.size());
    h = fnv1a_u64(h, static_cast<std::uint64_t>(v.kind));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(v.physical_class));
  }
  std::vector<Edge> edges = graph.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tuple(a.dst_var, a.src_var, a.src_lag) < std::tuple(b.dst_var, b.src_var, b.src_lag);
  });
  for (const auto& e : edges) {
    h = fnv1a_u64(h, static_cast<std::uint64_t>(e.src_var));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(e.src_lag));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(e.dst_var));
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof e.strength);
    std::memcpy(&bits, &e.strength, sizeof bits);
    h = fnv1a_u64(h, bits);
    h = fnv1a_u64(h, static_cast<std::uint64_t>(e.orientation_source));
  }
  return h;
}

int Scm::max_lag() const {
  int lag = 0;
  for (const auto& eq : equations) {
    for (const auto& p : eq.parents) lag = std::max(lag, p.lag);
  }
  return lag;
}

double Scm::mechanism_mean(int target, const double* parent_values) const {
  const auto& eq = equations[static_cast<std::size_t>(target)];
  const auto& st = standardization[static_cast<std::size_t>(target)];
  double acc = eq.intercept;
  double quad = 0.0;
  for (std::size_t j = 0; j < eq.parents.size(); ++j) {
    const auto& ps = standardization[static_cast<std::size_t>(eq.parents[j].var)];
    const double z = (parent_values[j] - ps.mean) / ps.stddev;
    acc += eq.beta[j] * z;
    quad += z * z;
  }
  acc += eq.gamma * quad;
  return st.mean + st.stddev * acc;
}

double Scm::mechanism_probability(int target, const double* parent_values) const {
  const auto& eq = equations[static_cast<std::size_t>(target)];
  double eta = eq.intercept;
  for (std::size_t j = 0; j < eq.parents.size(); ++j) {
    const auto& ps = standardization[static_cast<std::size_t>(eq.parents[j].var)];
    eta += eq.beta[j] * (parent_values[j] - ps.mean) / ps.stddev;
  }
  return 1.0 / (1.0 + std::exp(-eta));
}

double Scm::sigma_raw(int target) const {
  return equations[static_cast<std::size_t>(target)].sigma *
         standardization[static_cast<std::size_t>(target)].stddev;
}

Prediction predict(const Scm& scm, int target, const std::vector<double>& parent_values) {
  require(target >= 0 && target < static_cast<int>(scm.size()), Errc::InvalidArgument,
          "unknown prediction target");
  const auto& eq = scm.equations[static_cast<std::size_t>(target)];
  require(parent_values.size() == eq.parents.size(), Errc::MissingParentValue,
          "expected " + std::to_string(eq.parents.size()) + " parent values, got " +
              std::to_string(parent_values.size()));
  for (double v : parent_values) {
    require(std::isfinite(v), Errc::MissingParentValue, "parent value is not finite");
  }
  Prediction out;
  if (eq.form == StructuralEquation::Form::Logistic) {
    out.binary = true;
    out.probability = scm.mechanism_probability(target, parent_values.data());
    out.mean = out.probability;
  } else {
    out.mean = scm.mechanism_mean(target, parent_values.data());
    out.sigma = scm.sigma_raw(target);
  }
  return out;
}

Scm fit(const AugmentedFrame& aug, const CausalGraph& graph, const FitOptions& options) {
  require(aug.base_vars() == graph.variables.size(), Errc::NodeUniverseMismatch,
          "graph and frame disagree on the variable set");
  for (std::size_t i = 0; i < graph.variables.size(); ++i) {
    require(aug.meta()[i].name == graph.variables[i].name, Errc::NodeUniverseMismatch,
            "graph and frame disagree on variable order");
  }
  require(graph.tau <= aug.tau(), Errc::InvalidArgument,
          "graph lags exceed the augmented design");

  Scm scm;
  scm.variables = aug.meta();
  scm.tau = graph.tau;
  scm.graph_hash = structure_hash(graph);
  const std::size_t n = aug.base_vars();
  scm.standardization.resize(n);
  scm.equations.resize(n);

  // Per-variable fit-time moments from the lag-0 columns.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t col = aug.col_index(static_cast<int>(i), 0);
    double sum = 0.0, count = 0.0;
    for (std::size_t r = 0; r < aug.rows(); ++r) {
      if (aug.is_missing(r, col)) continue;
      sum += aug.at(r, col);
      count += 1.0;
    }
    require(count > 0.0, Errc::InsufficientData,
            "variable '" + aug.meta()[i].name + "' has no observed values");
    const double mean = sum / count;
    double ss = 0.0;
    for (std::size_t r = 0; r < aug.rows(); ++r) {
      if (aug.is_missing(r, col)) continue;
      const double d = aug.at(r, col) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / count);
    scm.standardization[i] = {mean, sd > 0.0 ? sd : 1.0};
  }

  for (std::size_t i = 0; i < n; ++i) {
    StructuralEquation eq;
    eq.target = static_cast<int>(i);
    eq.form = aug.meta()[i].kind == VariableKind::BinaryActuator
                  ? StructuralEquation::Form::Logistic
                  : StructuralEquation::Form::GaussianAdditive;
    for (const auto& e : graph.parents_of(static_cast<int>(i))) {
      eq.parents.push_back({e.src_var, e.src_lag});
    }
    std::sort(eq.parents.begin(), eq.parents.end(), [](const ColumnKey& a, const ColumnKey& b) {
      return std::tuple(a.var, a.lag) < std::tuple(b.var, b.lag);
    });
    eq.beta.assign(eq.parents.size(), 0.0);

    // Complete rows for this equation.
    std::vector<std::size_t> cols;
    cols.push_back(aug.col_index(static_cast<int>(i), 0));
    for (const auto& p : eq.parents) cols.push_back(aug.col_index(p.var, p.lag));
    std::vector<std::size_t> rows;
    rows.reserve(aug.rows());
    for (std::size_t r = 0; r < aug.rows(); ++r) {
      bool complete = true;
      for (std::size_t c : cols) {
        if (aug.is_missing(r, c)) {
          complete = false;
          break;
        }
      }
      if (complete) rows.push_back(r);
    }

    const std::size_t coeffs = eq.parents.size() + 2;
    require(static_cast<double>(rows.size()) >=
                options.rows_per_coefficient * static_cast<double>(coeffs),
            Errc::InsufficientData,
            "variable '" + aug.meta()[i].name + "' has " + std::to_string(rows.size()) +
                " usable rows for " + std::to_string(coeffs) + " coefficients");

    // Standardized parent columns; constant parents are dropped from the
    // design but keep their slot (beta stays zero).
    const std::size_t m = eq.parents.size();
    std::vector<std::vector<double>> zcols(m);
    std::vector<char> constant(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& st = scm.standardization[static_cast<std::size_t>(eq.parents[j].var)];
      const std::size_t col = cols[j + 1];
      auto& z = zcols[j];
      z.resize(rows.size());
      double lo = 1e300, hi = -1e300;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double v = aug.at(rows[r], col);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        z[r] = (v - st.mean) / st.stddev;
      }
      if (hi - lo <= 0.0) {
        constant[j] = 1;
        eq.dropped_parents.push_back(static_cast<int>(j));
      }
    }

    if (eq.form == StructuralEquation::Form::GaussianAdditive) {
      const auto& st = scm.standardization[i];
      std::vector<double> y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        y[r] = (aug.at(rows[r], cols[0]) - st.mean) / st.stddev;
      }
      std::vector<double> ones(rows.size(), 1.0);
      std::vector<double> quad(rows.size(), 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        if (constant[j]) continue;
        for (std::size_t r = 0; r < rows.size(); ++r) quad[r] += zcols[j][r] * zcols[j][r];
      }

      std::vector<const double*> design;
      std::vector<int> design_parent;  // -1 intercept, -2 quadratic, else parent slot
      design.push_back(ones.data());
      design_parent.push_back(-1);
      for (std::size_t j = 0; j < m; ++j) {
        if (constant[j]) continue;
        design.push_back(zcols[j].data());
        design_parent.push_back(static_cast<int>(j));
      }
      bool with_quad = m > 0 && std::any_of(constant.begin(), constant.end(),
                                            [](char c) { return c == 0; });
      if (with_quad) {
        design.push_back(quad.data());
        design_parent.push_back(-2);
      }

      auto ls = least_squares(design, y.data(), rows.size());
      for (std::size_t d = 0; d < design.size(); ++d) {
        const int slot = design_parent[d];
        const bool dropped =
            std::find(ls.dropped.begin(), ls.dropped.end(), d) != ls.dropped.end();
        if (slot == -1) {
          eq.intercept = ls.beta[d];
        } else if (slot == -2) {
          eq.gamma = ls.beta[d];
          if (dropped) eq.quadratic_dropped = true;
        } else {
          eq.beta[static_cast<std::size_t>(slot)] = ls.beta[d];
          if (dropped && std::find(eq.dropped_parents.begin(), eq.dropped_parents.end(), slot) ==
                             eq.dropped_parents.end()) {
            eq.dropped_parents.push_back(slot);
          }
        }
      }

      double ss = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        double pred = eq.intercept;
        double q = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (constant[j]) continue;
          pred += eq.beta[j] * zcols[j][r];
          q += zcols[j][r] * zcols[j][r];
        }
        pred += eq.gamma * q;
        const double res = y[r] - pred;
        ss += res * res;
      }
      eq.sigma = std::sqrt(ss / static_cast<double>(rows.size()));
    } else {
      std::vector<double> y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) y[r] = aug.at(rows[r], cols[0]);
      std::vector<double> ones(rows.size(), 1.0);
      std::vector<const double*> design;
      std::vector<int> design_parent;
      design.push_back(ones.data());
      design_parent.push_back(-1);
      for (std::size_t j = 0; j < m; ++j) {
        if (constant[j]) continue;
        design.push_back(zcols[j].data());
        design_parent.push_back(static_cast<int>(j));
      }
      auto lr = logistic_fit(design, y.data(), rows.size());
      eq.separation = lr.separation;
      eq.ridge = lr.ridge;
      for (std::size_t d = 0; d < design.size(); ++d) {
        const int slot = design_parent[d];
        if (slot == -1) {
          eq.intercept = lr.beta[d];
        } else {
          eq.beta[static_cast<std::size_t>(slot)] = lr.beta[d];
        }
      }
    }

    scm.equations[i] = std::move(eq);
  }
  return scm;
}

ResidualMatrix residuals(const Scm& scm, const TimeSeriesFrame& frame) {
  require(frame.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "frame and model disagree on the variable set");
  const int lag = scm.max_lag();
  require(frame.rows() > static_cast<std::size_t>(lag), Errc::SeriesTooShort,
          "frame shorter than the model's maximum lag");

  ResidualMatrix out;
  out.rows = frame.rows();
  out.cols = frame.cols();
  out.values.assign(out.rows * out.cols, 0.0);
  out.valid.assign(out.rows * out.cols, 0);

  std::vector<double> pv;
  for (std::size_t t = static_cast<std::size_t>(lag); t < frame.rows(); ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) {
      const auto& eq = scm.equations[i];
      if (frame.is_missing(t, i)) continue;
      pv.resize(eq.parents.size());
      bool complete = true;
      for (std::size_t j = 0; j < eq.parents.size(); ++j) {
        const std::size_t tp = t - static_cast<std::size_t>(eq.parents[j].lag);
        if (frame.is_missing(tp, static_cast<std::size_t>(eq.parents[j].var))) {
          complete = false;
          break;
        }
        pv[j] = frame.at(tp, static_cast<std::size_t>(eq.parents[j].var));
      }
      if (!complete) continue;
      const std::size_t cell = t * out.cols + i;
      if (eq.form == StructuralEquation::Form::GaussianAdditive) {
        const double v = frame.at(t, i);
        const double mean = scm.mechanism_mean(static_cast<int>(i), pv.data());
        double r = v - mean;
        // Nudge the residual so that mean + r reproduces the observation
        // exactly; the subtraction alone can land one ulp off.
        for (int step = 0; step < 4 && mean + r != v; ++step) {
          r = std::nextafter(r, mean + r < v ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity());
        }
        out.values[cell] = r;
      } else {
        const double p = scm.mechanism_probability(static_cast<int>(i), pv.data());
        // Midpoint of the activation-quantile interval consistent with the
        // outcome: [0, p] for 1, (p, 1] for 0.
        out.values[cell] = frame.at(t, i) > 0.5 ? 0.5 * p : 0.5 * (1.0 + p);
      }
      out.valid[cell] = 1;
    }
  }
  return out;
}

}  // namespace causaltwin
