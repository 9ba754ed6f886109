#include "causaltwin/rootcause.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/stats.hpp"

namespace causaltwin {
namespace {

// Topological order of the lag-0 parent relation. Exogenous draws are
// indexed by variable, so any valid order yields the same trajectory.
std::vector<int> replay_order(const Scm& scm) {
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

// Event frame shared by CE and Shapley: observation window, per-variable
// alarm-time and normal reference values, and the paired exogenous draws.
// The draws are materialized up front because every coalition shares them;
// the replay loop then runs without touching the RNG.
struct EventContext {
  const Scm* scm = nullptr;
  const std::vector<double>* alpha = nullptr;
  std::vector<double> initial;    // max_lag rows before the onset
  std::size_t horizon = 0;
  std::vector<double> anomalous;  // per variable, observed at the event peak
  std::vector<double> normal;     // per variable, trailing-window median
  std::vector<int> order;         // lag-0 evaluation order
  std::size_t samples = 0;
  std::vector<double> noise;      // samples x horizon x n, variable-index order
};

// Per-call scratch so coalition evaluations stay allocation-free.
struct ReplayScratch {
  std::vector<double> ring;  // last max_lag rows, slot t % lag
  std::vector<double> row;
  std::vector<double> parents;
  std::vector<char> forced;
  std::vector<double> forced_value;
};

EventContext build_context(const Scm& scm, const std::vector<double>& alpha,
                           const TimeSeriesFrame& data, const AlarmEvent& event,
                           const RootCauseOptions& options) {
  const std::size_t n = scm.size();
  require(data.cols() == n, Errc::NodeUniverseMismatch, "data does not match the model");
  require(alpha.size() == n, Errc::NodeUniverseMismatch, "weights do not match the model");
  require(event.begin <= event.end && event.end < data.rows(), Errc::InvalidArgument,
          "event window out of range");
  const std::size_t lag = static_cast<std::size_t>(scm.max_lag());
  require(event.begin >= lag + options.normal_window, Errc::InsufficientNormalWindow,
          "not enough normal history before the event");

  EventContext ctx;
  ctx.scm = &scm;
  ctx.alpha = &alpha;
  ctx.horizon = event.end - event.begin + 1;
  ctx.initial.resize(lag * n);
  for (std::size_t t = 0; t < lag; ++t) {
    for (std::size_t i = 0; i < n; ++i) ctx.initial[t * n + i] = data.at(event.begin - lag + t, i);
  }
  ctx.anomalous.resize(n);
  const std::size_t peak = std::clamp(event.peak_step, event.begin, event.end);
  for (std::size_t i = 0; i < n; ++i) ctx.anomalous[i] = data.at(peak, i);
  ctx.normal.resize(n);
  std::vector<double> window(options.normal_window);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < options.normal_window; ++t) {
      window[t] = data.at(event.begin - options.normal_window + t, i);
    }
    ctx.normal[i] = quantile_of(window, 0.5);
  }
  require(options.samples > 0, Errc::InvalidArgument, "need at least one noise sample");
  ctx.order = replay_order(scm);
  ctx.samples = options.samples;
  ctx.noise.resize(options.samples * ctx.horizon * n);
  for (std::size_t s = 0; s < options.samples; ++s) {
    // Same stream a Draw-mode simulation would consume: per step, one draw
    // per variable in index order.
    Rng rng(derive_seed(options.seed, 0xce, s));
    double* block = ctx.noise.data() + s * ctx.horizon * n;
    for (std::size_t t = 0; t < ctx.horizon; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        block[t * n + i] = scm.variables[i].kind == VariableKind::BinaryActuator ? rng.uniform()
                                                                                 : rng.normal();
      }
    }
  }
  return ctx;
}

// Mean MCAI over the event horizon with the flagged variables forced,
// averaged over the paired draws. Fuses simulation and scoring into one
// pass; scores match Detector::step run over the simulated trajectory.
double mean_mcai(const EventContext& ctx, const std::vector<char>& forced,
                 const std::vector<double>& forced_value, ReplayScratch& scratch) {
  const Scm& scm = *ctx.scm;
  const std::size_t n = scm.size();
  const std::size_t lag = static_cast<std::size_t>(std::max(scm.max_lag(), 1));
  const double* alpha = ctx.alpha->data();
  static const double kLogEps = -std::log(kBinaryScoreEps);

  scratch.ring.resize(lag * n);
  scratch.row.resize(n);
  scratch.parents.clear();

  double total = 0.0;
  for (std::size_t s = 0; s < ctx.samples; ++s) {
    const double* noise_block = ctx.noise.data() + s * ctx.horizon * n;
    std::copy(ctx.initial.begin(), ctx.initial.end(), scratch.ring.begin());
    for (std::size_t t = 0; t < ctx.horizon; ++t) {
      const double* noise = noise_block + t * n;
      double mcai = 0.0;
      for (const int i : ctx.order) {
        const StructuralEquation& eq = scm.equations[static_cast<std::size_t>(i)];
        scratch.parents.resize(eq.parents.size());
        for (std::size_t p = 0; p < eq.parents.size(); ++p) {
          const ColumnKey key = eq.parents[p];
          scratch.parents[p] =
              key.lag == 0
                  ? scratch.row[static_cast<std::size_t>(key.var)]
                  : scratch.ring[((t + lag - static_cast<std::size_t>(key.lag)) % lag) * n +
                                 static_cast<std::size_t>(key.var)];
        }
        double value;
        double score;
        if (eq.form == StructuralEquation::Form::Logistic) {
          const double p1 = scm.mechanism_probability(i, scratch.parents.data());
          value = forced[static_cast<std::size_t>(i)] ? forced_value[static_cast<std::size_t>(i)]
                                                      : (noise[i] <= p1 ? 1.0 : 0.0);
          const double p_obs = value > 0.5 ? p1 : 1.0 - p1;
          score = -std::log(std::max(p_obs, kBinaryScoreEps)) / kLogEps;
        } else {
          const double mean = scm.mechanism_mean(i, scratch.parents.data());
          const double sigma_raw = scm.sigma_raw(i);
          value = forced[static_cast<std::size_t>(i)] ? forced_value[static_cast<std::size_t>(i)]
                                                      : mean + sigma_raw * noise[i];
          score = std::abs(value - mean) / std::max(sigma_raw, 1e-12);
        }
        scratch.row[static_cast<std::size_t>(i)] = value;
        mcai += alpha[i] * score;
      }
      std::copy(scratch.row.begin(), scratch.row.end(),
                scratch.ring.begin() + (t % lag) * n);
      total += mcai;
    }
  }
  return total / (static_cast<double>(ctx.samples) * static_cast<double>(ctx.horizon));
}

// f over candidate subsets, memoized by bitmask.
struct CoalitionValue {
  const EventContext* ctx;
  const std::vector<int>* candidates;
  std::unordered_map<std::uint32_t, double> cache;
  std::size_t evaluations = 0;
  ReplayScratch scratch;

  double operator()(std::uint32_t mask) {
    const auto hit = cache.find(mask);
    if (hit != cache.end()) return hit->second;
    scratch.forced.assign(ctx->scm->size(), 0);
    scratch.forced_value.assign(ctx->scm->size(), 0.0);
    for (std::size_t j = 0; j < candidates->size(); ++j) {
      if (mask & (std::uint32_t{1} << j)) {
        const int var = (*candidates)[j];
        scratch.forced[static_cast<std::size_t>(var)] = 1;
        scratch.forced_value[static_cast<std::size_t>(var)] = ctx->anomalous[var];
      }
    }
    const double value = mean_mcai(*ctx, scratch.forced, scratch.forced_value, scratch);
    ++evaluations;
    cache.emplace(mask, value);
    return value;
  }
};

// CE of one variable: anomalous-vs-normal forcing, same paired draws.
double single_var_ce(const EventContext& ctx, int variable, ReplayScratch& scratch) {
  scratch.forced.assign(ctx.scm->size(), 0);
  scratch.forced_value.assign(ctx.scm->size(), 0.0);
  scratch.forced[static_cast<std::size_t>(variable)] = 1;
  scratch.forced_value[static_cast<std::size_t>(variable)] = ctx.anomalous[variable];
  const double with_anomaly = mean_mcai(ctx, scratch.forced, scratch.forced_value, scratch);
  scratch.forced_value[static_cast<std::size_t>(variable)] = ctx.normal[variable];
  const double with_normal = mean_mcai(ctx, scratch.forced, scratch.forced_value, scratch);
  return with_anomaly - with_normal;
}

}  // namespace

double causal_effect(const Scm& scm, const std::vector<double>& alpha,
                     const TimeSeriesFrame& data, const AlarmEvent& event, int variable,
                     const RootCauseOptions& options) {
  require(variable >= 0 && static_cast<std::size_t>(variable) < scm.size(), Errc::TargetMissing,
          "variable out of range");
  const EventContext ctx = build_context(scm, alpha, data, event, options);
  ReplayScratch scratch;
  return single_var_ce(ctx, variable, scratch);
}

namespace {

ShapleyResult shapley_on_context(const EventContext& ctx, const std::vector<int>& candidates,
                                 const RootCauseOptions& options) {
  const std::size_t m = candidates.size();
  require(m >= 1, Errc::InvalidArgument, "need at least one candidate");
  require(m <= 30, Errc::InvalidArgument, "candidate set too large");

  CoalitionValue f{&ctx, &candidates, {}, 0};
  ShapleyResult result;
  result.phi.assign(m, 0.0);

  const std::uint32_t full = m == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << m) - 1;

  if (m <= options.exact_limit) {
    result.exact = true;
    std::vector<double> fact(m + 1, 1.0);
    for (std::size_t k = 1; k <= m; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      const double fs = f(mask);
      const int size = std::popcount(mask);
      for (std::size_t j = 0; j < m; ++j) {
        const std::uint32_t bit = std::uint32_t{1} << j;
        if (mask & bit) continue;
        const double weight = fact[size] * fact[m - size - 1] / fact[m];
        result.phi[j] += weight * (f(mask | bit) - fs);
      }
    }
  } else {
    require(options.budget >= 10, Errc::BudgetTooSmall, "need at least 10 permutations");
    std::vector<std::size_t> order(m);
    for (std::size_t p = 0; p < options.budget; ++p) {
      for (std::size_t j = 0; j < m; ++j) order[j] = j;
      Rng rng(derive_seed(options.seed, 0x3a9, p));
      rng.shuffle(order);
      std::uint32_t mask = 0;
      double prev = f(0);
      for (std::size_t j : order) {
        mask |= std::uint32_t{1} << j;
        const double next = f(mask);
        result.phi[j] += next - prev;
        prev = next;
      }
    }
    for (double& phi : result.phi) phi /= static_cast<double>(options.budget);
  }

  // Efficiency: sum phi must telescope to f(full) - f(empty). Exact
  // enumeration satisfies it analytically; the sampled path is rescaled.
  const double target = f(full) - f(0);
  double total = 0.0;
  for (double phi : result.phi) total += phi;
  double range = 0.0;
  for (const auto& [mask, value] : f.cache) {
    (void)mask;
    range = std::max(range, value);
  }
  double low = range;
  for (const auto& [mask, value] : f.cache) {
    (void)mask;
    low = std::min(low, value);
  }
  range -= low;
  const double gap = std::abs(target - total);
  result.efficiency_correction = range > 0.0 ? gap / range : 0.0;
  if (!result.exact && gap > 0.0) {
    if (std::abs(total) > 1e-12 && total * target > 0.0) {
      const double scale = target / total;
      for (double& phi : result.phi) phi *= scale;
    } else {
      const double shift = (target - total) / static_cast<double>(m);
      for (double& phi : result.phi) phi += shift;
    }
    result.rescaled = result.efficiency_correction > 0.05;
  }
  result.evaluations = f.evaluations;
  return result;
}

}  // namespace

ShapleyResult shapley(const Scm& scm, const std::vector<double>& alpha,
                      const TimeSeriesFrame& data, const AlarmEvent& event,
                      const std::vector<int>& candidates, const RootCauseOptions& options) {
  for (int var : candidates) {
    require(var >= 0 && static_cast<std::size_t>(var) < scm.size(), Errc::TargetMissing,
            "candidate out of range");
  }
  const EventContext ctx = build_context(scm, alpha, data, event, options);
  return shapley_on_context(ctx, candidates, options);
}

RootCauseRanking rank_roots(const Scm& scm, const std::vector<double>& alpha,
                            const TimeSeriesFrame& data, const AlarmEvent& event,
                            const RootCauseOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const EventContext ctx = build_context(scm, alpha, data, event, options);
  const std::size_t n = scm.size();
  const std::size_t lag = static_cast<std::size_t>(scm.max_lag());

  // Per-variable scores over the normal window (for the percentile baseline)
  // and the event window (peak per variable).
  Detector detector(&scm, alpha, 0.0);
  std::vector<std::vector<double>> normal_scores(n);
  std::vector<double> row(n);
  const std::size_t scan_begin = event.begin - options.normal_window - lag;
  for (std::size_t t = scan_begin; t < event.begin; ++t) {
    for (std::size_t i = 0; i < n; ++i) row[i] = data.at(t, i);
    detector.step(row.data());
    if (t < scan_begin + lag) continue;
    for (std::size_t i = 0; i < n; ++i) normal_scores[i].push_back(detector.scores()[i]);
  }
  std::vector<double> event_peak(n, 0.0);
  {
    Detector scan(&scm, alpha, 0.0);
    for (std::size_t t = event.begin - lag; t <= event.end; ++t) {
      for (std::size_t i = 0; i < n; ++i) row[i] = data.at(t, i);
      scan.step(row.data());
      if (t < event.begin) continue;
      for (std::size_t i = 0; i < n; ++i) event_peak[i] = std::max(event_peak[i], scan.scores()[i]);
    }
  }

  struct Scored {
    int var;
    double ratio;
    double peak;
  };
  std::vector<Scored> exceeding;
  for (std::size_t i = 0; i < n; ++i) {
    const double baseline = quantile_of(normal_scores[i], options.exceedance_quantile);
    if (event_peak[i] > baseline) {
      const double ratio = baseline > 1e-12 ? event_peak[i] / baseline : event_peak[i];
      exceeding.push_back({static_cast<int>(i), ratio, event_peak[i]});
    }
  }

  RootCauseRanking ranking;
  ranking.onset = event.begin;
  ranking.end = event.end;
  ranking.seed = options.seed;

  std::vector<int> candidates;
  if (exceeding.empty()) {
    // No exceedance despite the alarm: fall back to the top scores.
    ranking.fallback_candidates = true;
    std::vector<Scored> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back({static_cast<int>(i), 0.0, event_peak[i]});
    std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
      return a.peak != b.peak ? a.peak > b.peak : a.var < b.var;
    });
    for (std::size_t j = 0; j < std::min<std::size_t>(5, all.size()); ++j) {
      candidates.push_back(all[j].var);
    }
  } else {
    std::sort(exceeding.begin(), exceeding.end(), [](const Scored& a, const Scored& b) {
      return a.ratio != b.ratio ? a.ratio > b.ratio : a.var < b.var;
    });
    for (std::size_t j = 0; j < std::min(options.max_candidates, exceeding.size()); ++j) {
      candidates.push_back(exceeding[j].var);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  const ShapleyResult shap = shapley_on_context(ctx, candidates, options);
  ranking.exact = shap.exact;
  ranking.efficiency_correction = shap.efficiency_correction;
  ranking.rescaled = shap.rescaled;
  ranking.evaluations = shap.evaluations;

  ReplayScratch scratch;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    RankingEntry entry;
    entry.var = candidates[j];
    entry.ce = single_var_ce(ctx, candidates[j], scratch);
    entry.phi = shap.phi[j];
    ranking.entries.push_back(entry);
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const RankingEntry& a, const RankingEntry& b) {
              if (a.phi != b.phi) return a.phi > b.phi;
              if (a.ce != b.ce) return a.ce > b.ce;
              return a.var < b.var;
            });

  ranking.attribution_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return ranking;
}

AttributionMetrics attribution_metrics(const std::vector<RootCauseRanking>& rankings,
                                       const std::vector<int>& truth) {
  require(rankings.size() == truth.size(), Errc::MissingGroundTruth,
          "need one ground-truth variable per ranking");
  require(!rankings.empty(), Errc::MissingGroundTruth, "no rankings to score");
  AttributionMetrics metrics;
  metrics.events = rankings.size();
  for (std::size_t e = 0; e < rankings.size(); ++e) {
    std::size_t rank = 0;  // 1-based; 0 = absent
    for (std::size_t j = 0; j < rankings[e].entries.size(); ++j) {
      if (rankings[e].entries[j].var == truth[e]) {
        rank = j + 1;
        break;
      }
    }
    if (rank >= 1 && rank <= 1) metrics.top1 += 1.0;
    if (rank >= 1 && rank <= 3) metrics.top3 += 1.0;
    if (rank >= 1 && rank <= 5) metrics.top5 += 1.0;
    if (rank >= 1) metrics.mrr += 1.0 / static_cast<double>(rank);
    metrics.mean_seconds += rankings[e].attribution_seconds;
  }
  const double count = static_cast<double>(rankings.size());
  metrics.top1 /= count;
  metrics.top3 /= count;
  metrics.top5 /= count;
  metrics.mrr /= count;
  metrics.mean_seconds /= count;
  return metrics;
}

}  // namespace causaltwin
