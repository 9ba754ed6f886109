#include <cstdio>
#include <memory>
#include <string>

#include "causaltwin/evalrun.hpp"

#include "commands.hpp"
#include "util.hpp"

namespace causaltwin::cli {
namespace {

struct EvalCmdOptions {
  std::string template_name = "swat51";
  std::size_t rows = 12000;
  bool no_enforce = false;
  int folds = 5;
  std::size_t prediction_samples = 256;
  std::size_t blocked_samples = 16;
  std::string report = "tables";
  bool timing = false;
};

const char* cost_name(DefenseCost cost) {
  switch (cost) {
    case DefenseCost::Low: return "low";
    case DefenseCost::Medium: return "medium";
    default: return "high";
  }
}

nlohmann::ordered_json eval_to_json(const EvalResult& r, bool timing) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["kind"] = "eval-report";
  doc["template"] = r.template_name;
  doc["seed"] = r.seed;
  doc["nodes"] = r.nodes;

  json structure;
  structure["truth_edges"] = r.truth_edges;
  structure["discovered_edges"] = r.discovered_edges;
  structure["shd"] = r.structure.normalized;
  structure["missing"] = r.structure.missing;
  structure["extra"] = r.structure.extra;
  structure["misoriented"] = r.structure.misoriented;
  structure["pcc"] = r.physical.value;
  structure["pcc_covered"] = r.physical.covered;
  structure["pcc_vacuous"] = r.physical.vacuous;
  structure["tcc"] = r.temporal.value;
  structure["tcc_checked"] = r.temporal.checked;
  structure["ci_tests"] = r.discovery.ci_tests;
  structure["tdmi_pairs"] = r.discovery.tdmi_pairs;
  if (timing) structure["seconds"] = r.discovery.seconds;
  doc["structure"] = std::move(structure);

  json cv;
  cv["aggregate_r2"] = r.cv.aggregate_r2;
  cv["aggregate_mse"] = r.cv.aggregate_mse;
  cv["folds"] = r.cv.folds;
  cv["variables"] = r.cv.per_variable.size();
  doc["cv"] = std::move(cv);

  json detection;
  detection["threshold"] = r.detection.threshold;
  detection["baseline_threshold"] = r.detection.baseline_threshold;
  detection["episodes"] = r.detection.episodes;
  detection["detected"] = r.detection.detected;
  detection["precision"] = r.detection.precision;
  detection["recall"] = r.detection.recall;
  detection["f1"] = r.detection.f1;
  detection["auc"] = r.detection.auc;
  detection["far"] = r.detection.far;
  detection["mean_delay"] = r.detection.mean_delay;
  detection["stealthy"] = r.detection.stealthy;
  detection["stealthy_detected"] = r.detection.stealthy_detected;
  detection["mean_lead"] = r.detection.mean_lead;
  detection["alarm_steps"] = r.detect.alarm_steps;
  detection["events"] = r.detect.events.size();
  if (timing) {
    detection["latency_mean_us"] = r.detect.latency_mean_us;
    detection["latency_p99_us"] = r.detect.latency_p99_us;
  }
  doc["detection"] = std::move(detection);

  json attribution;
  attribution["events"] = r.attribution.events;
  attribution["top1"] = r.attribution.top1;
  attribution["top3"] = r.attribution.top3;
  attribution["top5"] = r.attribution.top5;
  attribution["mrr"] = r.attribution.mrr;
  if (timing) attribution["mean_seconds"] = r.attribution.mean_seconds;
  doc["attribution"] = std::move(attribution);

  json portfolio = json::array();
  for (const DefenseOutcome& d : r.portfolio) {
    json row;
    row["name"] = d.name;
    row["cost"] = cost_name(d.cost);
    row["attacks_total"] = d.attacks_total;
    row["attacks_prevented"] = d.attacks_prevented;
    row["no_trigger"] = d.no_trigger;
    row["success_rate_reduction"] = d.success_rate_reduction;
    row["srr_ci"] = json::array({d.srr_ci_low, d.srr_ci_high});
    row["mean_blocked_probability"] = d.mean_blocked_probability;
    row["roi"] = d.roi;
    portfolio.push_back(std::move(row));
  }
  doc["portfolio"] = std::move(portfolio);

  json counterfactual;
  counterfactual["experiments"] = r.counterfactual.experiments;
  counterfactual["ipe"] = r.counterfactual.ipe;
  counterfactual["cfa"] = r.counterfactual.cfa;
  doc["counterfactual"] = std::move(counterfactual);

  return doc;
}

void run_eval(const PipelineConfig& cfg, const EvalCmdOptions& opts) {
  EvalConfig ec;
  ec.template_name = opts.template_name;
  ec.seed = cfg.seed;
  ec.train_rows = opts.rows;
  ec.tau = cfg.tau;
  ec.k = cfg.k;
  ec.ci_alpha = cfg.alpha;
  ec.enforce_catalog = !opts.no_enforce;
  ec.cv_folds = opts.folds;
  ec.detect_quantile = cfg.quantile;
  ec.shapley_budget = cfg.shapley_budget;
  ec.prediction_samples = opts.prediction_samples;
  ec.blocked_samples = opts.blocked_samples;

  EvalResult result = causaltwin::run_eval(ec);
  const nlohmann::ordered_json doc = eval_to_json(result, opts.timing);
  write_json(doc, out_path(cfg, "eval.json"));

  if (opts.report == "json") {
    std::printf("%s\n", doc.dump(2).c_str());
  } else {
    std::printf("%s", render_tables(result).c_str());
  }
  std::printf("wrote eval.json\n");
}

}  // namespace

void register_eval(CLI::App& app, PipelineConfig& cfg) {
  CLI::App* cmd = app.add_subcommand("eval", "full pipeline evaluation on a synthetic plant");
  auto opts = std::make_shared<EvalCmdOptions>();
  cmd->add_option("--template", opts->template_name, "plant template name");
  cmd->add_option("--rows", opts->rows, "clean training rows")->check(CLI::PositiveNumber);
  add_discovery_params(*cmd, cfg);
  cmd->add_flag("--no-enforce", opts->no_enforce, "discover without the constraint catalog");
  cmd->add_option("--folds", opts->folds, "forward-chaining CV folds")
      ->check(CLI::PositiveNumber);
  add_threshold_policy(*cmd, cfg);
  cmd->add_option("--budget", cfg.shapley_budget, "permutations for sampled Shapley")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--prediction-samples", opts->prediction_samples,
                  "Monte Carlo draws per interventional prediction");
  cmd->add_option("--blocked-samples", opts->blocked_samples,
                  "binary-latent draws per defense replay");
  cmd->add_option("--report", opts->report, "stdout format")
      ->check(CLI::IsMember({"tables", "json"}));
  cmd->add_flag("--timing", opts->timing, "include wall-clock fields in eval.json");
  add_seed_out(*cmd, cfg);
  attach_config(*cmd);
  cmd->callback([&cfg, opts] { run_eval(cfg, *opts); });
}

}  // namespace causaltwin::cli
