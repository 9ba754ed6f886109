#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "causaltwin/artifacts.hpp"
#include "causaltwin/detect.hpp"
#include "causaltwin/error.hpp"

#include "commands.hpp"
#include "util.hpp"

namespace causaltwin::cli {
namespace {

struct DetectCmdOptions {
  std::string scm_path;
  std::string graph_path;
  double threshold = 0.0;
  bool threshold_given = false;
  bool calibrate = false;
  bool stream = false;
  std::size_t merge_gap = 5;
  bool timing = false;
};

double resolve_threshold(const PipelineConfig& cfg, const DetectCmdOptions& opts, const Scm& scm,
                         const std::vector<double>& weights, const TimeSeriesFrame& frame) {
  if (opts.threshold_given) return opts.threshold;
  require(opts.calibrate, Errc::InvalidArgument, "need --threshold or --calibrate");
  ScoreSeries scores = collect_scores(scm, weights, frame);
  std::vector<double> calib;
  std::vector<std::int32_t> labels;
  calib.reserve(frame.rows() - scores.warmup);
  for (std::size_t t = scores.warmup; t < frame.rows(); ++t) {
    calib.push_back(scores.mcai[t]);
    labels.push_back(frame.label(t));
  }
  ThresholdPolicy policy;
  policy.kind = cfg.threshold_policy == "maxf1" ? ThresholdPolicy::Kind::MaxF1
                                                : ThresholdPolicy::Kind::Quantile;
  policy.quantile = cfg.quantile;
  const double threshold = calibrate_threshold(calib, labels, policy);
  std::fprintf(stderr, "calibrated threshold %.6g (%s)\n", threshold,
               cfg.threshold_policy.c_str());
  return threshold;
}

void run_detect(const PipelineConfig& cfg, const DetectCmdOptions& opts) {
  Scm scm = load_scm_json(opts.scm_path);
  CausalGraph graph = load_graph_json(opts.graph_path);
  require_matching_hash(scm, graph);
  std::vector<double> weights = mcai_weights(graph);
  TimeSeriesFrame frame = load_frame(cfg);
  require(frame.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "data and model declare different variable counts");

  const double threshold = resolve_threshold(cfg, opts, scm, weights, frame);

  if (opts.stream) {
    // One JSON line per input row; nothing is retained across rows beyond
    // the detector state, so the stream can be arbitrarily long.
    Detector detector(&scm, weights, threshold);
    std::vector<double> row(frame.cols());
    for (std::size_t t = 0; t < frame.rows(); ++t) {
      for (std::size_t i = 0; i < frame.cols(); ++i) row[i] = frame.at(t, i);
      const StepResult r = detector.step(row.data());
      nlohmann::ordered_json line;
      line["step"] = t;
      line["mcai"] = r.mcai;
      line["alarm"] = r.alarm;
      line["warmup"] = r.warmup;
      std::cout << line.dump() << '\n';
    }
    return;
  }

  StreamOptions sopts;
  sopts.merge_gap = opts.merge_gap;
  DetectReport report = run_stream(scm, weights, threshold, frame, sopts);
  save_detect_report_json(report, threshold, out_path(cfg, "detect_report.json"), opts.timing);

  std::printf("threshold %.6g\n", threshold);
  std::printf("%zu steps  %zu alarmed  %zu events  peak mcai %.4f\n", report.steps,
              report.alarm_steps, report.events.size(), report.peak_mcai);
  std::printf("step latency mean %.1f us  p99 %.1f us\n", report.latency_mean_us,
              report.latency_p99_us);
  std::printf("wrote detect_report.json\n");
}

}  // namespace

void register_detect(CLI::App& app, PipelineConfig& cfg) {
  CLI::App* cmd = app.add_subcommand("detect", "score a stream and report alarm events");
  auto opts = std::make_shared<DetectCmdOptions>();
  add_data_inputs(*cmd, cfg, true);
  cmd->add_option("--scm", opts->scm_path, "fitted model JSON")->required();
  cmd->add_option("--graph", opts->graph_path, "structure artifact JSON")->required();
  CLI::Option* thr = cmd->add_option("--threshold", opts->threshold, "alarm threshold");
  cmd->add_flag("--calibrate", opts->calibrate, "calibrate the threshold on this stream");
  add_threshold_policy(*cmd, cfg);
  cmd->add_flag("--stream", opts->stream, "emit one JSON line per input row");
  cmd->add_option("--merge-gap", opts->merge_gap,
                  "merge alarm runs separated by at most this many quiet steps");
  cmd->add_flag("--timing", opts->timing, "include latency fields in the report");
  add_seed_out(*cmd, cfg);
  attach_config(*cmd);
  cmd->callback([&cfg, opts, thr] {
    opts->threshold_given = thr->count() > 0;
    run_detect(cfg, *opts);
  });
}

}  // namespace causaltwin::cli
