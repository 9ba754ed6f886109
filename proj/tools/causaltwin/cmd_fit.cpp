#include <cstdio>
#include <memory>
#include <string>

#include "causaltwin/artifacts.hpp"
#include "causaltwin/error.hpp"

#include "commands.hpp"
#include "util.hpp"

namespace causaltwin::cli {
namespace {

struct FitCmdOptions {
  std::string graph_path;
};

void run_fit(const PipelineConfig& cfg, const FitCmdOptions& opts) {
  CausalGraph graph = load_graph_json(opts.graph_path);
  TimeSeriesFrame frame = load_frame(cfg);
  require(graph.size() == frame.cols(), Errc::NodeUniverseMismatch,
          "graph and data declare different variable counts");
  for (std::size_t i = 0; i < graph.size(); ++i) {
    require(graph.variables[i].name == frame.meta()[i].name, Errc::NodeUniverseMismatch,
            "graph and data disagree at variable " + frame.meta()[i].name);
  }

  AugmentedFrame aug = augment(frame, graph.tau);
  Scm scm = fit(aug, graph);
  save_scm_json(scm, out_path(cfg, "scm.json"));

  std::printf("fitted %zu mechanisms on %zu rows (structure hash %llu)\n", scm.size(),
              frame.rows(), static_cast<unsigned long long>(scm.graph_hash));
  std::printf("wrote scm.json\n");
}

}  // namespace

void register_fit(CLI::App& app, PipelineConfig& cfg) {
  CLI::App* cmd = app.add_subcommand("fit", "estimate mechanisms for a discovered structure");
  auto opts = std::make_shared<FitCmdOptions>();
  add_data_inputs(*cmd, cfg, true);
  cmd->add_option("--graph", opts->graph_path, "structure artifact JSON")->required();
  add_seed_out(*cmd, cfg);
  attach_config(*cmd);
  cmd->callback([&cfg, opts] { run_fit(cfg, *opts); });
}

}  // namespace causaltwin::cli
