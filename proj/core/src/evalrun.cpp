#include "causaltwin/evalrun.hpp"

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {
namespace {

// First step in [begin, end] with score strictly above the threshold, or
// end + 1 when the window never alarms.
std::size_t first_alarm(const std::vector<double>& scores, std::size_t warmup, double threshold,
                        std::size_t begin, std::size_t end) {
  std::size_t lo = std::max(begin, warmup);
  for (std::size_t t = lo; t <= end && t < scores.size(); ++t) {
    if (scores[t] > threshold) return t;
  }
  return end + 1;
}

const char* cost_name(DefenseCost cost) {
  switch (cost) {
    case DefenseCost::Low: return "low";
    case DefenseCost::Medium: return "medium";
    default: return "high";
  }
}

}  // namespace

DetectionSuiteMetrics detection_suite_metrics(const ScoreSeries& scores, double threshold,
                                              const TimeSeriesFrame& frame,
                                              const std::vector<AttackEpisode>& episodes,
                                              const std::vector<double>& baseline,
                                              double baseline_threshold) {
  require(scores.mcai.size() == frame.rows(), Errc::InvalidArgument,
          "detection_suite_metrics: score/frame row mismatch");
  DetectionSuiteMetrics out;
  out.threshold = threshold;
  out.baseline_threshold = baseline_threshold;
  out.episodes = episodes.size();

  std::size_t alarmed = 0, alarmed_attack = 0, normal_steps = 0, false_alarms = 0;
  for (std::size_t t = scores.warmup; t < frame.rows(); ++t) {
    bool alarm = scores.mcai[t] > threshold;
    bool attack = frame.label(t) > 0;
    if (alarm) {
      ++alarmed;
      if (attack) ++alarmed_attack;
    }
    if (!attack) {
      ++normal_steps;
      if (alarm) ++false_alarms;
    }
  }
  out.far = normal_steps > 0 ? static_cast<double>(false_alarms) / normal_steps : 0.0;
  out.precision = alarmed > 0 ? static_cast<double>(alarmed_attack) / alarmed : 0.0;

  // Mann-Whitney AUC over the scored steps, ties by average rank.
  std::vector<std::pair<double, char>> ranked;
  ranked.reserve(frame.rows() - scores.warmup);
  for (std::size_t t = scores.warmup; t < frame.rows(); ++t) {
    ranked.emplace_back(scores.mcai[t], frame.label(t) > 0 ? 1 : 0);
  }
  std::sort(ranked.begin(), ranked.end());
  const std::size_t attack_steps = frame.rows() - scores.warmup - normal_steps;
  if (attack_steps > 0 && normal_steps > 0) {
    double attack_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < ranked.size()) {
      std::size_t j = i;
      while (j < ranked.size() && ranked[j].first == ranked[i].first) ++j;
      const double avg_rank = static_cast<double>(i + j + 1) / 2.0;  // 1-based
      for (std::size_t k = i; k < j; ++k) {
        if (ranked[k].second) attack_rank_sum += avg_rank;
      }
      i = j;
    }
    const double m = static_cast<double>(attack_steps);
    out.auc = (attack_rank_sum - m * (m + 1.0) / 2.0) / (m * static_cast<double>(normal_steps));
  }

  double lead_sum = 0.0;
  double delay_sum = 0.0;
  for (const AttackEpisode& ep : episodes) {
    std::size_t end = std::min(ep.end, frame.rows() - 1);
    std::size_t ours = first_alarm(scores.mcai, scores.warmup, threshold, ep.onset, end);
    bool detected = ours <= end;
    if (detected) {
      ++out.detected;
      delay_sum += static_cast<double>(ours - ep.onset);
    }
    if (ep.kind == "stealthy-ramp") {
      ++out.stealthy;
      if (detected) {
        ++out.stealthy_detected;
        std::size_t ref = first_alarm(baseline, scores.warmup, baseline_threshold, ep.onset, end);
        lead_sum += static_cast<double>(ref) - static_cast<double>(ours);
      }
    }
  }
  out.recall = out.episodes > 0 ? static_cast<double>(out.detected) / out.episodes : 0.0;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  out.mean_delay = out.detected > 0 ? delay_sum / out.detected : 0.0;
  out.mean_lead = out.stealthy_detected > 0 ? lead_sum / out.stealthy_detected : 0.0;
  return out;
}

std::vector<DefenseSpec> standard_portfolio(double threshold,
                                            const std::vector<VariableMeta>& variables) {
  std::vector<int> levels, pumps;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].physical_class == PhysicalClass::Level) levels.push_back(static_cast<int>(i));
    if (variables[i].physical_class == PhysicalClass::Pump) pumps.push_back(static_cast<int>(i));
  }
  DefenseTrigger trigger{DefenseTrigger::Kind::McaiAbove, threshold};

  std::vector<DefenseSpec> out;
  out.push_back({"no-op", trigger, {DefenseAction::Kind::NoOp, 0, {}, {}}, DefenseCost::Low});
  out.push_back(
      {"clamp-top1", trigger, {DefenseAction::Kind::ClampTopScored, 1, {}, {}}, DefenseCost::Low});
  out.push_back({"clamp-top3",
                 trigger,
                 {DefenseAction::Kind::ClampTopScored, 3, {}, {}},
                 DefenseCost::Medium});
  out.push_back({"level-shield",
                 trigger,
                 {DefenseAction::Kind::ClampFixed, 0, levels, {}},
                 DefenseCost::High});
  out.push_back({"pump-interlock",
                 trigger,
                 {DefenseAction::Kind::ForceValue, 0, pumps, std::vector<double>(pumps.size(), 1.0)},
                 DefenseCost::Medium});
  return out;
}

EvalResult run_eval(const EvalConfig& config) {
  EvalResult out;
  out.template_name = config.template_name;
  out.seed = config.seed;

  PlantGenerator gen(config.template_name, config.seed);
  const PlantBundle& bundle = gen.bundle();
  out.nodes = gen.size();
  out.truth_edges = bundle.truth_graph.edges.size();

  TimeSeriesFrame train = gen.clean(config.train_rows, 0);
  AugmentedFrame aug = augment(train, config.tau);

  DiscoveryOptions dopts;
  dopts.k = config.k;
  dopts.alpha = config.ci_alpha;
  dopts.seed = derive_seed(config.seed, 0xd15c);
  dopts.enforce_catalog = config.enforce_catalog;
  CausalGraph discovered = discover(aug, bundle.catalog, dopts, &out.discovery);
  out.discovered_edges = discovered.edges.size();

  out.structure = shd(bundle.truth_graph, discovered);
  out.physical = pcc(discovered, bundle.catalog);
  out.temporal = tcc(discovered, train);
  out.cv = cv_score(train, discovered, config.cv_folds);

  Scm scm = fit(aug, discovered);

  PlantGenerator::Suite suite = gen.attack_suite(1);
  std::vector<double> weights = mcai_weights(discovered);
  ScoreSeries scores = collect_scores(scm, weights, suite.frame);

  std::vector<double> calib_scores;
  std::vector<std::int32_t> calib_labels;
  calib_scores.reserve(suite.frame.rows());
  for (std::size_t t = scores.warmup; t < suite.frame.rows(); ++t) {
    calib_scores.push_back(scores.mcai[t]);
    calib_labels.push_back(suite.frame.label(t));
  }
  ThresholdPolicy policy{ThresholdPolicy::Kind::Quantile, config.detect_quantile};
  double threshold = calibrate_threshold(calib_scores, calib_labels, policy);

  out.detect = run_stream(scm, weights, threshold, suite.frame);

  ZScoreBaseline zbase = ZScoreBaseline::fit(train, config.baseline_window);
  std::vector<double> zscores = baseline_scores(zbase, suite.frame);
  std::vector<double> zcalib;
  zcalib.reserve(zscores.size());
  std::vector<std::int32_t> zlabels;
  for (std::size_t t = scores.warmup; t < suite.frame.rows(); ++t) {
    zcalib.push_back(zscores[t]);
    zlabels.push_back(suite.frame.label(t));
  }
  double zthreshold = calibrate_threshold(zcalib, zlabels, policy);

  out.detection = detection_suite_metrics(scores, threshold, suite.frame, suite.episodes, zscores,
                                          zthreshold);

  for (const AttackEpisode& ep : suite.episodes) {
    std::size_t end = std::min(ep.end, suite.frame.rows() - 1);
    std::size_t ours = first_alarm(scores.mcai, scores.warmup, threshold, ep.onset, end);
    if (ours > end) continue;  // undetected episodes are not attributed

    AlarmEvent event;
    event.begin = ep.onset;
    event.end = end;
    event.peak = scores.mcai[ep.onset];
    event.peak_step = ep.onset;
    for (std::size_t t = ep.onset; t <= end; ++t) {
      if (scores.mcai[t] > event.peak) {
        event.peak = scores.mcai[t];
        event.peak_step = t;
      }
    }

    RootCauseOptions ropts;
    ropts.budget = config.shapley_budget;
    ropts.seed = derive_seed(config.seed, 0xce, static_cast<std::uint64_t>(ep.id));
    out.rankings.push_back(rank_roots(scm, weights, suite.frame, event, ropts));
    out.ranking_truth.push_back(ep.root_var);
  }
  out.attribution = attribution_metrics(out.rankings, out.ranking_truth);

  std::vector<DefenseSpec> defenses = standard_portfolio(threshold, suite.frame.meta());
  DefenseReplayOptions dro;
  dro.blocked_samples = config.blocked_samples;
  dro.seed = derive_seed(config.seed, 0xdef);
  out.portfolio = evaluate_defense_portfolio(scm, weights, suite.frame, suite.episodes, defenses,
                                             dro);

  PlantGenerator::ExperimentRun ex = gen.natural_experiments(2);
  CounterfactualMetricsOptions cmo;
  cmo.prediction_samples = config.prediction_samples;
  cmo.seed = derive_seed(config.seed, 0xcf);
  out.counterfactual = counterfactual_metrics(scm, bundle.truth_scm, ex.frame, ex.experiments, cmo);

  return out;
}

std::string render_tables(const EvalResult& r) {
  std::ostringstream os;
  os << std::fixed;

  os << "== structure ==\n";
  os << "template " << r.template_name << "  seed " << r.seed << "  nodes " << r.nodes << "\n";
  os << std::setprecision(4);
  os << "edges truth " << r.truth_edges << "  discovered " << r.discovered_edges << "\n";
  os << "shd " << r.structure.normalized << "  (missing " << r.structure.missing << ", extra "
     << r.structure.extra << ", misoriented " << r.structure.misoriented << ")\n";
  os << "pcc " << r.physical.value << (r.physical.vacuous ? "  (vacuous)" : "") << "  over "
     << r.physical.covered << " covered edges\n";
  os << "tcc " << r.temporal.value << "  over " << r.temporal.checked << " checked edges\n";
  os << std::setprecision(2);
  os << "discovery " << r.discovery.seconds << " s  (tdmi pairs " << r.discovery.tdmi_pairs
     << ", ci tests " << r.discovery.ci_tests << ", lag0 cycle deletions "
     << r.discovery.lag0_cycle_deletions << ")\n\n";

  os << "== mechanisms ==\n";
  os << std::setprecision(4);
  os << "cv r2 " << r.cv.aggregate_r2 << "  mse " << r.cv.aggregate_mse << "  over "
     << r.cv.per_variable.size() << " variables, " << r.cv.folds << " folds\n\n";

  os << "== detection ==\n";
  os << "threshold " << r.detection.threshold << "  reference threshold "
     << r.detection.baseline_threshold << "\n";
  os << "episodes " << r.detection.detected << "/" << r.detection.episodes << " detected\n";
  os << std::setw(10) << "precision" << std::setw(10) << "recall" << std::setw(10) << "f1-score"
     << std::setw(10) << "auc" << "\n";
  os << std::setw(10) << r.detection.precision << std::setw(10) << r.detection.recall
     << std::setw(10) << r.detection.f1 << std::setw(10) << r.detection.auc << "\n";
  os << "far " << r.detection.far << "  mean detection delay ";
  os << std::setprecision(1) << r.detection.mean_delay << " steps\n";
  os << "stealthy " << r.detection.stealthy_detected << "/" << r.detection.stealthy
     << " detected, mean lead " << r.detection.mean_lead << " steps vs moving z-score\n";
  os << "stream " << r.detect.steps << " steps, " << r.detect.alarm_steps << " alarmed, "
     << r.detect.events.size() << " events, step latency mean " << r.detect.latency_mean_us
     << " us (p99 " << r.detect.latency_p99_us << ")\n\n";

  os << "== attribution ==\n";
  os << std::setprecision(4);
  os << "events " << r.attribution.events << "  top1 " << r.attribution.top1 << "  top3 "
     << r.attribution.top3 << "  top5 " << r.attribution.top5 << "  mrr " << r.attribution.mrr
     << "\n";
  os << std::setprecision(2);
  os << "mean attribution time " << r.attribution.mean_seconds << " s\n\n";

  os << "== defense portfolio ==\n";
  os << std::setprecision(4);
  for (const DefenseOutcome& d : r.portfolio) {
    os << std::left << std::setw(16) << d.name << std::right << "  cost " << std::setw(6)
       << cost_name(d.cost) << "  prevented " << std::setw(2) << d.attacks_prevented << "/"
       << d.attacks_total << "  srr " << d.success_rate_reduction << " [" << d.srr_ci_low << ", "
       << d.srr_ci_high << "]"
       << "  roi " << d.roi << "\n";
  }
  os << "\n";

  os << "== interventional / counterfactual ==\n";
  os << "experiments " << r.counterfactual.experiments << "  ipe " << r.counterfactual.ipe
     << "  cfa " << r.counterfactual.cfa << "\n";
  return os.str();
}

}  // namespace causaltwin
