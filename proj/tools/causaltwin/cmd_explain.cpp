#include <algorithm>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "causaltwin/artifacts.hpp"
#include "causaltwin/detect.hpp"
#include "causaltwin/error.hpp"
#include "causaltwin/rng.hpp"
#include "causaltwin/rootcause.hpp"

#include "commands.hpp"
#include "util.hpp"

namespace causaltwin::cli {
namespace {

struct ExplainCmdOptions {
  std::string scm_path;
  std::string graph_path;
  double threshold = 0.0;
  bool threshold_given = false;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool window_given = false;
  std::size_t normal_window = 300;
  std::size_t samples = 4;
  std::size_t merge_gap = 5;
  bool timing = false;
};

// Event over an explicit window: the peak is located by scoring the window.
AlarmEvent window_event(const Scm& scm, const std::vector<double>& weights,
                        const TimeSeriesFrame& frame, std::size_t begin, std::size_t end) {
  require(begin <= end && end < frame.rows(), Errc::InvalidArgument,
          "event window out of range");
  ScoreSeries scores = collect_scores(scm, weights, frame);
  AlarmEvent event;
  event.begin = begin;
  event.end = end;
  event.peak = scores.mcai[begin];
  event.peak_step = begin;
  for (std::size_t t = begin; t <= end; ++t) {
    if (scores.mcai[t] > event.peak) {
      event.peak = scores.mcai[t];
      event.peak_step = t;
    }
  }
  return event;
}

void run_explain(const PipelineConfig& cfg, const ExplainCmdOptions& opts) {
  Scm scm = load_scm_json(opts.scm_path);
  CausalGraph graph = load_graph_json(opts.graph_path);
  require_matching_hash(scm, graph);
  std::vector<double> weights = mcai_weights(graph);
  TimeSeriesFrame frame = load_frame(cfg);
  require(frame.cols() == scm.size(), Errc::NodeUniverseMismatch,
          "data and model declare different variable counts");

  std::vector<AlarmEvent> events;
  if (opts.window_given) {
    events.push_back(window_event(scm, weights, frame, opts.begin, opts.end));
  } else {
    require(opts.threshold_given, Errc::InvalidArgument,
            "need --begin/--end or --threshold to locate events");
    StreamOptions sopts;
    sopts.merge_gap = opts.merge_gap;
    sopts.measure_latency = false;
    DetectReport report = run_stream(scm, weights, opts.threshold, frame, sopts);
    events = report.events;
    require(!events.empty(), Errc::InvalidArgument, "no alarm events at this threshold");
  }

  std::vector<RootCauseRanking> rankings;
  rankings.reserve(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    RootCauseOptions ropts;
    ropts.budget = cfg.shapley_budget;
    ropts.samples = opts.samples;
    ropts.normal_window = opts.normal_window;
    ropts.seed = derive_seed(cfg.seed, 0xce, e);
    rankings.push_back(rank_roots(scm, weights, frame, events[e], ropts));
  }
  save_rankings_json(rankings, out_path(cfg, "rankings.json"), opts.timing);

  for (std::size_t e = 0; e < rankings.size(); ++e) {
    const RootCauseRanking& r = rankings[e];
    std::printf("event %zu: steps %zu..%zu, %zu coalition evaluations (%s)%s\n", e, r.onset,
                r.end, r.evaluations, r.exact ? "exact" : "sampled",
                r.fallback_candidates ? ", fallback candidates" : "");
    const std::size_t top = std::min<std::size_t>(5, r.entries.size());
    for (std::size_t j = 0; j < top; ++j) {
      const RankingEntry& entry = r.entries[j];
      std::printf("  %-12s phi %9.4f  ce %9.4f\n",
                  frame.meta()[static_cast<std::size_t>(entry.var)].name.c_str(), entry.phi,
                  entry.ce);
    }
  }
  std::printf("wrote rankings.json\n");
}

}  // namespace

void register_explain(CLI::App& app, PipelineConfig& cfg) {
  CLI::App* cmd = app.add_subcommand("explain", "rank root-cause candidates for alarm events");
  auto opts = std::make_shared<ExplainCmdOptions>();
  add_data_inputs(*cmd, cfg, true);
  cmd->add_option("--scm", opts->scm_path, "fitted model JSON")->required();
  cmd->add_option("--graph", opts->graph_path, "structure artifact JSON")->required();
  CLI::Option* thr =
      cmd->add_option("--threshold", opts->threshold, "alarm threshold for event location");
  CLI::Option* begin = cmd->add_option("--begin", opts->begin, "explicit event window start");
  CLI::Option* end = cmd->add_option("--end", opts->end, "explicit event window end (inclusive)");
  begin->needs(end);
  end->needs(begin);
  cmd->add_option("--normal-window", opts->normal_window,
                  "pre-event steps for the per-variable normal reference");
  cmd->add_option("--samples", opts->samples, "paired noise draws per coalition value")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget", cfg.shapley_budget, "permutations for sampled Shapley")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--merge-gap", opts->merge_gap,
                  "merge alarm runs separated by at most this many quiet steps");
  cmd->add_flag("--timing", opts->timing, "include timing fields in the report");
  add_seed_out(*cmd, cfg);
  attach_config(*cmd);
  cmd->callback([&cfg, opts, thr, begin] {
    opts->threshold_given = thr->count() > 0;
    opts->window_given = begin->count() > 0;
    run_explain(cfg, *opts);
  });
}

}  // namespace causaltwin::cli
