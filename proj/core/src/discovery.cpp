#include "causaltwin/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "causaltwin/error.hpp"
#include "causaltwin/parallel.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/stats.hpp"
#include "mi_internal.hpp"

namespace causaltwin {

namespace {

constexpr std::uint64_t kSurrogateStream = 0x7du;

// Shared Phase I machinery: per-variable bin labels over base rows, a strided
// row sample, and per-variable shuffled label copies for the surrogate null.
// Surrogate randomness depends only on (seed, variable, shuffle index), so a
// single-target call and batch discovery see identical thresholds.
struct Phase1Context {
  const AugmentedFrame* aug = nullptr;
  int bins = 16;
  DeltaPolicy policy;
  std::uint64_t seed = 0;

  std::size_t tau = 0;
  std::vector<std::size_t> sampled_rows;  // augmented row indices
  std::vector<detail::BinnedSeries> base_labels;  // per variable, over base rows
  std::vector<char> constant;
  // shuffled[j][s]: sampled lag-0 labels of variable j, shuffled.
  std::vector<std::vector<std::vector<std::uint16_t>>> shuffled;
  bool any_missing = false;
  std::vector<std::vector<char>> valid;  // per variable, over base rows
};

Phase1Context build_phase1(const AugmentedFrame& aug, int bins, const DeltaPolicy& policy,
                           std::uint64_t seed, std::size_t max_rows) {
  require(bins >= 2, Errc::InvalidArgument, "need at least two bins");
  Phase1Context ctx;
  ctx.aug = &aug;
  ctx.bins = bins;
  ctx.policy = policy;
  ctx.seed = seed;
  ctx.tau = static_cast<std::size_t>(aug.tau());

  const std::size_t rows = aug.rows();
  require(rows > static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins),
          Errc::SeriesTooShort, "need more rows than bins^2 for the screening stage");
  const std::size_t stride = std::max<std::size_t>(1, (rows + max_rows - 1) / max_rows);
  for (std::size_t r = 0; r < rows; r += stride) ctx.sampled_rows.push_back(r);

  const std::size_t n = aug.base_vars();
  const std::size_t base_rows = rows + ctx.tau;
  ctx.base_labels.resize(n);
  ctx.constant.assign(n, 0);
  ctx.valid.resize(n);
  ctx.any_missing = aug.has_missing();

  for (std::size_t j = 0; j < n; ++j) {
    // Recover the base series from lag-0 and the first row's lag columns.
    std::vector<double> series(base_rows);
    for (std::size_t l = ctx.tau; l > 0; --l) series[ctx.tau - l] = aug.at(0, aug.col_index(static_cast<int>(j), static_cast<int>(l)));
    const std::size_t lag0 = aug.col_index(static_cast<int>(j), 0);
    for (std::size_t r = 0; r < rows; ++r) series[ctx.tau + r] = aug.at(r, lag0);

    const bool binary = aug.meta()[j].kind == VariableKind::BinaryActuator;
    ctx.base_labels[j] = detail::bin_series(series, bins, binary);
    ctx.constant[j] = ctx.base_labels[j].constant ? 1 : 0;

    if (ctx.any_missing) {
      auto& v = ctx.valid[j];
      v.assign(base_rows, 1);
      for (std::size_t l = ctx.tau; l > 0; --l) {
        v[ctx.tau - l] = aug.is_missing(0, aug.col_index(static_cast<int>(j), static_cast<int>(l))) ? 0 : 1;
      }
      for (std::size_t r = 0; r < rows; ++r) v[ctx.tau + r] = aug.is_missing(r, lag0) ? 0 : 1;
    }
  }

  if (policy.kind == DeltaPolicy::Kind::PermutationSurrogate) {
    ctx.shuffled.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (ctx.constant[j]) continue;
      auto& per_var = ctx.shuffled[j];
      per_var.resize(static_cast<std::size_t>(policy.shuffles));
      std::vector<std::uint16_t> sampled(ctx.sampled_rows.size());
      for (std::size_t s = 0; s < ctx.sampled_rows.size(); ++s) {
        sampled[s] = ctx.base_labels[j].labels[ctx.sampled_rows[s] + ctx.tau];
      }
      for (int s = 0; s < policy.shuffles; ++s) {
        per_var[static_cast<std::size_t>(s)] = sampled;
        Rng rng(derive_seed(seed, kSurrogateStream, j, static_cast<std::uint64_t>(s)));
        rng.shuffle(per_var[static_cast<std::size_t>(s)]);
      }
    }
  }
  return ctx;
}

// MI between variable j at the given lag and the target at lag 0 over the
// sampled rows.
double pair_mi(const Phase1Context& ctx, std::size_t j, int lag, std::size_t target,
               std::vector<std::int32_t>& scratch, std::vector<std::uint16_t>& xbuf,
               std::vector<std::uint16_t>& ybuf) {
  const auto& xl = ctx.base_labels[j];
  const auto& yl = ctx.base_labels[target];
  xbuf.clear();
  ybuf.clear();
  for (std::size_t s : ctx.sampled_rows) {
    const std::size_t xi = s + ctx.tau - static_cast<std::size_t>(lag);
    const std::size_t yi = s + ctx.tau;
    if (ctx.any_missing && (!ctx.valid[j][xi] || !ctx.valid[target][yi])) continue;
    xbuf.push_back(xl.labels[xi]);
    ybuf.push_back(yl.labels[yi]);
  }
  if (xbuf.size() < 8) return 0.0;
  return detail::mi_from_labels(xbuf.data(), ybuf.data(), xbuf.size(), xl.levels, yl.levels,
                                scratch);
}

// Surrogate threshold for (source j, target) shared across lags: shuffling
// removes the pairing entirely, so the null does not depend on the lag.
double surrogate_threshold(const Phase1Context& ctx, std::size_t j, std::size_t target,
                           std::vector<std::int32_t>& scratch,
                           std::vector<std::uint16_t>& xbuf, std::vector<std::uint16_t>& ybuf) {
  const auto& yl = ctx.base_labels[target];
  std::vector<double> null_mis;
  null_mis.reserve(static_cast<std::size_t>(ctx.policy.shuffles));
  for (const auto& labels : ctx.shuffled[j]) {
    xbuf.clear();
    ybuf.clear();
    for (std::size_t s = 0; s < ctx.sampled_rows.size(); ++s) {
      const std::size_t yi = ctx.sampled_rows[s] + ctx.tau;
      if (ctx.any_missing && (!ctx.valid[j][ctx.sampled_rows[s] + ctx.tau] || !ctx.valid[target][yi]))
        continue;
      xbuf.push_back(labels[s]);
      ybuf.push_back(yl.labels[yi]);
    }
    if (xbuf.size() < 8) {
      null_mis.push_back(0.0);
      continue;
    }
    null_mis.push_back(detail::mi_from_labels(xbuf.data(), ybuf.data(), xbuf.size(),
                                              ctx.base_labels[j].levels, yl.levels, scratch));
  }
  std::sort(null_mis.begin(), null_mis.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(ctx.policy.quantile * static_cast<double>(null_mis.size())));
  rank = std::min(std::max<std::size_t>(rank, 1), null_mis.size());
  return null_mis[rank - 1];
}

// `rejected`, when given, drops sources before the cap: a relationship the
// catalog can never admit must not spend one of the k candidate slots.
CandidateSet phase1_target(const Phase1Context& ctx, int target, int k,
                           std::size_t* pair_counter,
                           const std::vector<char>* rejected = nullptr) {
  CandidateSet out;
  out.target = target;
  const std::size_t t = static_cast<std::size_t>(target);
  if (ctx.constant[t]) {
    out.constant_target = true;
    return out;
  }

  const std::size_t n = ctx.aug->base_vars();
  const int tau = ctx.aug->tau();
  std::vector<std::int32_t> scratch;
  std::vector<std::uint16_t> xbuf, ybuf;
  xbuf.reserve(ctx.sampled_rows.size());
  ybuf.reserve(ctx.sampled_rows.size());

  std::vector<Candidate> passing;
  for (std::size_t j = 0; j < n; ++j) {
    if (ctx.constant[j]) continue;
    if (rejected != nullptr && (*rejected)[j]) continue;
    double threshold = ctx.policy.absolute;
    if (ctx.policy.kind == DeltaPolicy::Kind::PermutationSurrogate) {
      threshold = surrogate_threshold(ctx, j, t, scratch, xbuf, ybuf);
    }
    for (int lag = 0; lag <= tau; ++lag) {
      if (j == t && lag == 0) continue;
      if (pair_counter) ++*pair_counter;
      const double mi = pair_mi(ctx, j, lag, t, scratch, xbuf, ybuf);
      if (mi > threshold) {
        passing.push_back({static_cast<int>(j), lag, mi, threshold});
      }
    }
  }

  std::sort(passing.begin(), passing.end(), [](const Candidate& a, const Candidate& b) {
    if (a.tdmi != b.tdmi) return a.tdmi > b.tdmi;
    if (a.var != b.var) return a.var < b.var;
    return a.lag < b.lag;
  });
  if (passing.size() > static_cast<std::size_t>(k)) passing.resize(static_cast<std::size_t>(k));
  out.candidates = std::move(passing);
  return out;
}

// ---- Phase II: covariance-based partial correlation over a target's local
// column set. Equivalent to residualization but O(s^3) per test after one
// covariance pass.

struct LocalCovariance {
  std::vector<double> cov;  // (m x m), m = columns.size()
  std::size_t rows_used = 0;
  std::size_t m = 0;
};

LocalCovariance local_covariance(const AugmentedFrame& aug, const std::vector<std::size_t>& cols) {
  const std::size_t m = cols.size();
  LocalCovariance out;
  out.m = m;
  out.cov.assign(m * m, 0.0);

  std::vector<double> sums(m, 0.0);
  std::vector<double> row(m);
  std::vector<std::vector<double>> data(m);
  for (auto& d : data) d.reserve(aug.rows());

  for (std::size_t r = 0; r < aug.rows(); ++r) {
    bool complete = true;
    for (std::size_t c = 0; c < m && complete; ++c) {
      if (aug.is_missing(r, cols[c])) complete = false;
    }
    if (!complete) continue;
    for (std::size_t c = 0; c < m; ++c) {
      row[c] = aug.at(r, cols[c]);
      data[c].push_back(row[c]);
      sums[c] += row[c];
    }
    ++out.rows_used;
  }
  require(out.rows_used >= m + 4, Errc::InsufficientData,
          "too few complete rows for the independence tests");

  const double n = static_cast<double>(out.rows_used);
  std::vector<double> means(m);
  for (std::size_t c = 0; c < m; ++c) means[c] = sums[c] / n;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double acc = 0.0;
      const auto& da = data[a];
      const auto& db = data[b];
      for (std::size_t r = 0; r < da.size(); ++r) {
        acc += (da[r] - means[a]) * (db[r] - means[b]);
      }
      out.cov[a * m + b] = acc / n;
      out.cov[b * m + a] = out.cov[a * m + b];
    }
  }
  return out;
}

// Partial correlation of local columns (a, b) given S, from the inverse of
// the covariance submatrix. Returns false when the submatrix is singular.
bool partial_corr_from_cov(const LocalCovariance& lc, std::size_t a, std::size_t b,
                           const std::vector<std::size_t>& cond, double* rho) {
  const std::size_t s = cond.size() + 2;
  std::vector<std::size_t> idx;
  idx.reserve(s);
  idx.push_back(a);
  idx.push_back(b);
  idx.insert(idx.end(), cond.begin(), cond.end());

  std::vector<double> sub(s * s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) sub[i * s + j] = lc.cov[idx[i] * lc.m + idx[j]];
  }

  // Cholesky; singular pivots abort.
  double max_diag = 0.0;
  for (std::size_t i = 0; i < s; ++i) max_diag = std::max(max_diag, sub[i * s + i]);
  const double tol = std::max(max_diag, 1e-300) * 1e-10;
  std::vector<double> chol(sub);
  for (std::size_t j = 0; j < s; ++j) {
    double d = chol[j * s + j];
    for (std::size_t k = 0; k < j; ++k) d -= chol[j * s + k] * chol[j * s + k];
    if (d <= tol) return false;
    chol[j * s + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < s; ++i) {
      double v = chol[i * s + j];
      for (std::size_t k = 0; k < j; ++k) v -= chol[i * s + k] * chol[j * s + k];
      chol[i * s + j] = v / chol[j * s + j];
    }
  }

  // Solve L L^T x = e for e in {e0, e1}; only three inverse entries matter.
  auto solve_unit = [&](std::size_t unit, std::vector<double>& x) {
    x.assign(s, 0.0);
    x[unit] = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
      double v = x[i];
      for (std::size_t k = 0; k < i; ++k) v -= chol[i * s + k] * x[k];
      x[i] = v / chol[i * s + i];
    }
    for (std::size_t ii = s; ii-- > 0;) {
      double v = x[ii];
      for (std::size_t k = ii + 1; k < s; ++k) v -= chol[k * s + ii] * x[k];
      x[ii] = v / chol[ii * s + ii];
    }
  };
  std::vector<double> x0, x1;
  solve_unit(0, x0);
  solve_unit(1, x1);
  const double om00 = x0[0], om11 = x1[1], om01 = x0[1];
  if (om00 <= 0.0 || om11 <= 0.0) return false;
  *rho = -om01 / std::sqrt(om00 * om11);
  return true;
}

void subsets_of_size(std::size_t n, std::size_t k, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> pick(k);
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) return visit(pick);
    for (std::size_t i = start; i + (k - depth) <= n; ++i) {
      pick[depth] = i;
      if (rec(i + 1, depth + 1)) return true;
    }
    return false;
  };
  if (k == 0) {
    visit({});
    return;
  }
  rec(0, 0);
}

struct TargetPruneResult {
  std::vector<Candidate> parents;
  std::size_t ci_tests = 0;
  std::size_t singular_retries = 0;
};

TargetPruneResult prune_target(const AugmentedFrame& aug, int target,
                               const std::vector<Candidate>& candidates, double alpha) {
  TargetPruneResult out;
  if (candidates.empty()) return out;

  std::vector<std::size_t> cols;
  cols.push_back(aug.col_index(target, 0));
  for (const auto& c : candidates) cols.push_back(aug.col_index(c.var, c.lag));
  const LocalCovariance lc = local_covariance(aug, cols);

  // Local indices: 0 = target, 1..m = candidates in rank order.
  std::vector<std::size_t> active(candidates.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i + 1;

  auto test_pair = [&](std::size_t cand_local, std::vector<std::size_t> cond) {
    // A singular conditioning set sheds its latest-added member and retries.
    double rho = 0.0;
    while (true) {
      if (partial_corr_from_cov(lc, 0, cand_local, cond, &rho)) break;
      if (cond.empty()) return std::pair<double, double>(0.0, 1.0);  // degenerate pair
      cond.pop_back();
      ++out.singular_retries;
    }
    ++out.ci_tests;
    const double p = fisher_z_pvalue(rho, lc.rows_used, cond.size());
    return std::pair<double, double>(rho, p);
  };

  for (std::size_t level = 0;; ++level) {
    if (active.size() <= level) break;
    const std::vector<std::size_t> snapshot = active;  // PC-stable: level-start adjacency
    std::vector<char> removed(snapshot.size(), 0);

    for (std::size_t ci = 0; ci < snapshot.size(); ++ci) {
      std::vector<std::size_t> others;
      for (std::size_t cj = 0; cj < snapshot.size(); ++cj) {
        if (cj != ci) others.push_back(snapshot[cj]);
      }
      if (others.size() < level) continue;
      bool independent = false;
      subsets_of_size(others.size(), level, [&](const std::vector<std::size_t>& pick) {
        std::vector<std::size_t> cond;
        cond.reserve(level);
        for (std::size_t p : pick) cond.push_back(others[p]);
        const auto [rho, pval] = test_pair(snapshot[ci], cond);
        if (pval >= alpha) {
          independent = true;
          return true;  // stop enumerating
        }
        return false;
      });
      if (independent) removed[ci] = 1;
    }

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      if (!removed[i]) next.push_back(snapshot[i]);
    }
    // Candidates pruned at earlier levels are already gone from active; the
    // snapshot covers exactly the survivors, so replacing is sound.
    active = std::move(next);
    if (level + 1 >= std::max<std::size_t>(active.size(), 1)) break;
  }

  for (std::size_t local : active) out.parents.push_back(candidates[local - 1]);
  return out;
}

bool catalog_rejects(const ConstraintCatalog& catalog, const std::vector<VariableMeta>& meta,
                     int src, int dst) {
  if (catalog.pair_forbidden(meta[src].name, meta[dst].name)) return true;
  return catalog.direction_coverage(meta[src].physical_class, meta[dst].physical_class) ==
         ConstraintCatalog::Coverage::Reversed;
}

}  // namespace

CiResult ci_test(const AugmentedFrame& aug, ColumnKey a, ColumnKey b,
                 std::vector<ColumnKey> conditioning, double alpha) {
  CiResult result;
  while (true) {
    std::vector<std::size_t> cols;
    cols.push_back(aug.col_index(a.var, a.lag));
    cols.push_back(aug.col_index(b.var, b.lag));
    for (const auto& key : conditioning) cols.push_back(aug.col_index(key.var, key.lag));

    // Complete rows only.
    std::vector<std::vector<double>> data(cols.size());
    for (std::size_t r = 0; r < aug.rows(); ++r) {
      bool complete = true;
      for (std::size_t c = 0; c < cols.size() && complete; ++c) {
        if (aug.is_missing(r, cols[c])) complete = false;
      }
      if (!complete) continue;
      for (std::size_t c = 0; c < cols.size(); ++c) data[c].push_back(aug.at(r, cols[c]));
    }
    const std::size_t rows = data[0].size();
    require(rows >= cols.size() + 4, Errc::InsufficientData,
            "too few complete rows for a CI test");
    result.rows_used = rows;

    // Residualize both endpoints on [1, conditioners].
    std::vector<double> ones(rows, 1.0);
    std::vector<const double*> design;
    design.push_back(ones.data());
    for (std::size_t c = 2; c < cols.size(); ++c) design.push_back(data[c].data());

    const auto fit_a = least_squares(design, data[0].data(), rows);
    const auto fit_b = least_squares(design, data[1].data(), rows);
    const bool singular = !fit_a.dropped.empty() || !fit_b.dropped.empty();
    if (singular && !conditioning.empty()) {
      conditioning.pop_back();
      ++result.dropped_conditioners;
      continue;
    }

    auto residual = [&](const std::vector<double>& y, const std::vector<double>& beta) {
      std::vector<double> res(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        double pred = beta[0];
        for (std::size_t c = 0; c + 1 < beta.size(); ++c) pred += beta[c + 1] * design[c + 1][r];
        res[r] = y[r] - pred;
      }
      return res;
    };
    const std::vector<double> ra = residual(data[0], fit_a.beta);
    const std::vector<double> rb = residual(data[1], fit_b.beta);
    result.partial_correlation = pearson(ra, rb);
    result.p_value = fisher_z_pvalue(result.partial_correlation, rows, conditioning.size());
    result.independent = result.p_value >= alpha;
    return result;
  }
}

CausalGraph discover(const AugmentedFrame& aug, const ConstraintCatalog& catalog,
                     const DiscoveryOptions& options, DiscoveryStats* stats) {
  const auto started = std::chrono::steady_clock::now();
  require(options.k >= 1, Errc::InvalidArgument, "candidate cap must be positive");
  if (!catalog.empty()) catalog.check();

  const std::size_t n = aug.base_vars();
  Phase1Context ctx =
      build_phase1(aug, options.bins, options.delta, options.seed, options.max_tdmi_rows);

  // Phase I + II per target. Slots are indexed by target so the result does
  // not depend on scheduling.
  std::vector<TargetPruneResult> pruned(n);
  std::vector<std::size_t> pair_counts(n, 0);
  const bool enforce = options.enforce_catalog && !catalog.empty();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<char> rejected;
    for (std::size_t i = begin; i < end; ++i) {
      const std::vector<char>* mask = nullptr;
      if (enforce) {
        rejected.assign(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
          rejected[j] =
              catalog_rejects(catalog, aug.meta(), static_cast<int>(j), static_cast<int>(i)) ? 1 : 0;
        }
        mask = &rejected;
      }
      CandidateSet cands =
          phase1_target(ctx, static_cast<int>(i), options.k, &pair_counts[i], mask);
      pruned[i] = prune_target(aug, static_cast<int>(i), cands.candidates, options.alpha);
    }
  });

  CausalGraph graph;
  graph.variables = aug.meta();
  graph.tau = aug.tau();

  // Collect directed survivors; lag-0 pairs may appear in both directions.
  struct Directed {
    int src, lag, dst;
    double strength;
  };
  std::vector<Directed> survivors;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& c : pruned[i].parents) {
      survivors.push_back({c.var, c.lag, static_cast<int>(i), c.tdmi});
    }
  }

  auto coverage = [&](int src, int dst) {
    return catalog.direction_coverage(aug.meta()[src].physical_class,
                                      aug.meta()[dst].physical_class);
  };
  auto is_control_pair = [&](int src, int dst) {
    const PhysicalClass cs = aug.meta()[src].physical_class;
    const PhysicalClass cd = aug.meta()[dst].physical_class;
    if (cs != PhysicalClass::Controller) return false;
    return cd == PhysicalClass::Pump || cd == PhysicalClass::Valve;
  };

  std::set<std::pair<int, int>> handled_lag0;
  for (const auto& d : survivors) {
    if (d.lag > 0) {
      graph.edges.push_back({d.src, d.lag, d.dst, d.strength, OrientationSource::Temporal});
      continue;
    }
    const auto key = std::minmax(d.src, d.dst);
    if (handled_lag0.count({key.first, key.second})) continue;
    handled_lag0.insert({key.first, key.second});

    const Directed* reverse = nullptr;
    for (const auto& r : survivors) {
      if (r.lag == 0 && r.src == d.dst && r.dst == d.src) {
        reverse = &r;
        break;
      }
    }

    int src = d.src, dst = d.dst;
    double strength = d.strength;
    OrientationSource source = OrientationSource::CIStatistics;
    if (reverse == nullptr) {
      // Only one direction survived the local tests.
      if (coverage(src, dst) == ConstraintCatalog::Coverage::Allowed) {
        source = is_control_pair(src, dst) ? OrientationSource::ControlLogic
                                           : OrientationSource::Physical;
      } else if (is_control_pair(src, dst)) {
        source = OrientationSource::ControlLogic;
      }
    } else {
      strength = std::max(d.strength, reverse->strength);
      const auto fwd = coverage(d.src, d.dst);
      const auto bwd = coverage(d.dst, d.src);
      if (fwd == ConstraintCatalog::Coverage::Allowed && bwd != ConstraintCatalog::Coverage::Allowed) {
        src = d.src;
        dst = d.dst;
        source = is_control_pair(src, dst) ? OrientationSource::ControlLogic
                                           : OrientationSource::Physical;
      } else if (bwd == ConstraintCatalog::Coverage::Allowed &&
                 fwd != ConstraintCatalog::Coverage::Allowed) {
        src = d.dst;
        dst = d.src;
        source = is_control_pair(src, dst) ? OrientationSource::ControlLogic
                                           : OrientationSource::Physical;
      } else if (is_control_pair(d.src, d.dst)) {
        source = OrientationSource::ControlLogic;
      } else if (is_control_pair(d.dst, d.src)) {
        src = d.dst;
        dst = d.src;
        source = OrientationSource::ControlLogic;
      } else {
        // Statistics fallback: stronger screening signal wins, then stage
        // order, then index, so the choice is deterministic.
        if (reverse->strength > d.strength) {
          src = d.dst;
          dst = d.src;
        } else if (reverse->strength == d.strength) {
          const auto& ms = aug.meta()[d.src];
          const auto& md = aug.meta()[d.dst];
          if (std::pair(ms.stage, d.src) > std::pair(md.stage, d.dst)) {
            src = d.dst;
            dst = d.src;
          }
        }
      }
    }
    graph.edges.push_back({src, 0, dst, strength, source});
  }

  // Lag-0 acyclicity: repeatedly delete the weakest edge on a cycle.
  std::size_t deletions = 0;
  while (true) {
    std::vector<std::vector<std::size_t>> out_edges(n);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      if (graph.edges[e].src_lag == 0) out_edges[graph.edges[e].src_var].push_back(e);
    }
    // Iterative DFS cycle search.
    std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::size_t> cycle_edges;
    std::function<bool(int, std::vector<std::size_t>&)> dfs = [&](int u,
                                                                  std::vector<std::size_t>& path) {
      state[u] = 1;
      for (std::size_t e : out_edges[u]) {
        const int v = graph.edges[e].dst_var;
        if (state[v] == 1) {
          // Close the cycle: edges from v forward in the path, plus e.
          auto it = std::find_if(path.begin(), path.end(), [&](std::size_t pe) {
            return graph.edges[pe].src_var == v;
          });
          cycle_edges.assign(it, path.end());
          cycle_edges.push_back(e);
          return true;
        }
        if (state[v] == 0) {
          path.push_back(e);
          if (dfs(v, path)) return true;
          path.pop_back();
        }
      }
      state[u] = 2;
      return false;
    };
    bool found = false;
    for (std::size_t u = 0; u < n && !found; ++u) {
      if (state[u] == 0) {
        std::vector<std::size_t> path;
        found = dfs(static_cast<int>(u), path);
      }
    }
    if (!found) break;
    std::size_t weakest = cycle_edges.front();
    for (std::size_t e : cycle_edges) {
      if (graph.edges[e].strength < graph.edges[weakest].strength) weakest = e;
    }
    graph.edges.erase(graph.edges.begin() + static_cast<std::ptrdiff_t>(weakest));
    ++deletions;
  }

  std::sort(graph.edges.begin(), graph.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tuple(a.dst_var, a.src_var, a.src_lag) < std::tuple(b.dst_var, b.src_var, b.src_lag);
  });
  graph.check();

  if (stats) {
    stats->tdmi_pairs = 0;
    for (std::size_t c : pair_counts) stats->tdmi_pairs += c;
    stats->ci_tests = 0;
    stats->max_ci_tests_per_target = 0;
    stats->singular_retries = 0;
    for (const auto& p : pruned) {
      stats->ci_tests += p.ci_tests;
      stats->max_ci_tests_per_target = std::max(stats->max_ci_tests_per_target, p.ci_tests);
      stats->singular_retries += p.singular_retries;
    }
    stats->lag0_cycle_deletions = deletions;
    stats->seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return graph;
}

CandidateSet select_candidates(const AugmentedFrame& aug, int target, int k,
                               const DeltaPolicy& policy, int bins, std::uint64_t seed,
                               std::size_t max_rows) {
  Phase1Context ctx = build_phase1(aug, bins, policy, seed, max_rows);
  return phase1_target(ctx, target, k, nullptr);
}

}  // namespace causaltwin
