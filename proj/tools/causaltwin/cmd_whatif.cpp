#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "causaltwin/artifacts.hpp"
#include "causaltwin/csv.hpp"
#include "causaltwin/error.hpp"
#include "causaltwin/inference.hpp"

#include "commands.hpp"
#include "util.hpp"

namespace causaltwin::cli {
namespace {

struct WhatifCmdOptions {
  std::string scm_path;
  std::vector<std::string> do_specs;     // NAME=VALUE[@STEP]
  std::vector<std::string> clamp_specs;  // NAME[@STEP]
  std::string target;
  std::size_t horizon = 200;
  std::size_t samples = 256;
  bool counterfactual = false;
  std::size_t begin = 0;
  std::size_t end = 0;
};

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    require(used == text.size(), Errc::InvalidArgument, what + ": trailing text in " + text);
    return value;
  } catch (const std::logic_error&) {
    raise(Errc::InvalidArgument, what + ": cannot parse number " + text);
  }
}

// NAME=VALUE[@STEP] -> Force; NAME[@STEP] -> ClampToMechanism.
Intervention parse_intervention(const std::string& spec, const TimeSeriesFrame& frame,
                                bool force) {
  Intervention iv;
  std::string head = spec;
  const std::size_t at = spec.rfind('@');
  if (at != std::string::npos) {
    head = spec.substr(0, at);
    iv.start_step = static_cast<std::size_t>(
        parse_number(spec.substr(at + 1), "intervention step"));
  }
  if (force) {
    const std::size_t eq = head.find('=');
    require(eq != std::string::npos, Errc::InvalidArgument,
            "expected NAME=VALUE[@STEP], got " + spec);
    iv.kind = Intervention::Kind::Force;
    iv.var = variable_index(frame, head.substr(0, eq));
    iv.value = parse_number(head.substr(eq + 1), "intervention value");
  } else {
    iv.kind = Intervention::Kind::ClampToMechanism;
    iv.var = variable_index(frame, head);
  }
  return iv;
}

void run_whatif(const PipelineConfig& cfg, const WhatifCmdOptions& opts) {
  Scm scm = load_scm_json(opts.scm_path);
  TimeSeriesFrame frame = load_frame(cfg);
  require(frame.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "data and model declare different variable counts");

  std::vector<Intervention> interventions;
  for (const std::string& spec : opts.do_specs) {
    interventions.push_back(parse_intervention(spec, frame, true));
  }
  for (const std::string& spec : opts.clamp_specs) {
    interventions.push_back(parse_intervention(spec, frame, false));
  }

  nlohmann::ordered_json report;
  report["kind"] = "whatif";
  nlohmann::ordered_json ivs = nlohmann::ordered_json::array();
  for (const Intervention& iv : interventions) {
    nlohmann::ordered_json item;
    item["var"] = frame.meta()[static_cast<std::size_t>(iv.var)].name;
    item["kind"] = iv.kind == Intervention::Kind::Force ? "force" : "clamp";
    if (iv.kind == Intervention::Kind::Force) item["value"] = iv.value;
    item["start_step"] = iv.start_step;
    ivs.push_back(std::move(item));
  }
  report["interventions"] = std::move(ivs);

  if (opts.counterfactual) {
    // Abduct the evidence window, mutilate, re-predict; intervention steps
    // index rows inside the window.
    require(opts.end >= opts.begin && opts.end < frame.rows(), Errc::InvalidArgument,
            "evidence window out of range");
    TimeSeriesFrame evidence = slice_rows(frame, opts.begin, opts.end + 1);
    CounterfactualQuery query{interventions};
    Trajectory traj = counterfactual(scm, evidence, query);

    std::vector<double> values = traj.values;
    TimeSeriesFrame out_frame(frame.meta(),
                              std::vector<std::int64_t>(evidence.timestamps().begin(),
                                                        evidence.timestamps().end()),
                              std::move(values));
    write_csv(out_frame, schema_for(out_frame, false), out_path(cfg, "counterfactual.csv"));

    report["mode"] = "counterfactual";
    report["evidence_begin"] = opts.begin;
    report["evidence_end"] = opts.end;
    std::printf("counterfactual over rows %zu..%zu with %zu interventions\n", opts.begin,
                opts.end, interventions.size());
    if (!opts.target.empty()) {
      const int target = variable_index(frame, opts.target);
      double factual = 0.0, counterfactual_mean = 0.0;
      for (std::size_t t = 0; t < traj.rows; ++t) {
        factual += evidence.at(t, static_cast<std::size_t>(target));
        counterfactual_mean += traj.at(t, static_cast<std::size_t>(target));
      }
      factual /= static_cast<double>(traj.rows);
      counterfactual_mean /= static_cast<double>(traj.rows);
      report["target"] = opts.target;
      report["factual_mean"] = factual;
      report["counterfactual_mean"] = counterfactual_mean;
      std::printf("%s: factual mean %.4f, counterfactual mean %.4f\n", opts.target.c_str(),
                  factual, counterfactual_mean);
    }
    write_json(report, out_path(cfg, "whatif.json"));
    std::printf("wrote counterfactual.csv, whatif.json\n");
    return;
  }

  require(!opts.target.empty(), Errc::InvalidArgument, "interventional mode needs --target");
  require(!interventions.empty(), Errc::InvalidArgument, "need at least one --do or --clamp");
  const int target = variable_index(frame, opts.target);

  // Initial window: the most recent max_lag observed rows.
  const std::size_t lag = static_cast<std::size_t>(scm.max_lag());
  require(frame.rows() >= lag, Errc::SeriesTooShort, "history shorter than the model lag");
  std::vector<double> initial(lag * frame.cols());
  for (std::size_t t = 0; t < lag; ++t) {
    for (std::size_t i = 0; i < frame.cols(); ++i) {
      initial[t * frame.cols() + i] = frame.at(frame.rows() - lag + t, i);
    }
  }

  const double value = do_expectation(scm, interventions, initial, opts.horizon, target,
                                      cfg.seed, opts.samples);
  report["mode"] = "do";
  report["target"] = opts.target;
  report["horizon"] = opts.horizon;
  report["samples"] = opts.samples;
  report["seed"] = cfg.seed;
  report["expectation"] = value;
  write_json(report, out_path(cfg, "whatif.json"));

  std::printf("E[%s | do(...)] over %zu steps, %zu samples = %.6f\n", opts.target.c_str(),
              opts.horizon, opts.samples, value);
  std::printf("wrote whatif.json\n");
}

}  // namespace

void register_whatif(CLI::App& app, PipelineConfig& cfg) {
  CLI::App* cmd = app.add_subcommand("whatif", "interventional and counterfactual queries");
  auto opts = std::make_shared<WhatifCmdOptions>();
  add_data_inputs(*cmd, cfg, true);
  cmd->add_option("--scm", opts->scm_path, "fitted model JSON")->required();
  cmd->add_option("--do", opts->do_specs, "force NAME=VALUE[@STEP]");
  cmd->add_option("--clamp", opts->clamp_specs, "clamp NAME[@STEP] to its mechanism");
  cmd->add_option("--target", opts->target, "outcome variable");
  cmd->add_option("--horizon", opts->horizon, "simulation steps (interventional mode)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--samples", opts->samples, "Monte Carlo draws (interventional mode)")
      ->check(CLI::PositiveNumber);
  CLI::Option* cf = cmd->add_flag("--counterfactual", opts->counterfactual,
                                  "replay an observed window instead of simulating forward");
  CLI::Option* begin = cmd->add_option("--begin", opts->begin, "evidence window start");
  CLI::Option* end = cmd->add_option("--end", opts->end, "evidence window end (inclusive)");
  begin->needs(cf);
  end->needs(cf);
  cf->needs(begin);
  cf->needs(end);
  add_seed_out(*cmd, cfg);
  attach_config(*cmd);
  cmd->callback([&cfg, opts] { run_whatif(cfg, *opts); });
}

}  // namespace causaltwin::cli
