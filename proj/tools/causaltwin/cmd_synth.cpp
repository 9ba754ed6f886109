#include <cstdio>
#include <memory>
#include <string>

#include "causaltwin/artifacts.hpp"
#include "causaltwin/csv.hpp"
#include "causaltwin/error.hpp"
#include "causaltwin/synth.hpp"

#include "commands.hpp"
#include "util.hpp"

namespace causaltwin::cli {
namespace {

struct SynthOptions {
  std::string template_name = "swat51";
  std::size_t rows = 12000;
  std::string attacks;  // suite name; empty = no attack stream
  bool experiments = false;
};

void run_synth(const PipelineConfig& cfg, const SynthOptions& opts) {
  if (!opts.attacks.empty()) {
    require(opts.attacks == "suite-v1", Errc::InvalidArgument,
            "unknown attack suite: " + opts.attacks);
  }
  PlantGenerator gen(opts.template_name, cfg.seed);
  const PlantBundle& bundle = gen.bundle();

  save_graph_json(bundle.truth_graph, out_path(cfg, "truth_graph.json"));
  save_scm_json(bundle.truth_scm, out_path(cfg, "truth_scm.json"));
  save_catalog_json(bundle.catalog, out_path(cfg, "catalog.json"));

  TimeSeriesFrame train = gen.clean(opts.rows, 0);
  Schema schema = schema_for(train, false);
  save_schema(schema, out_path(cfg, "schema.json"));
  write_csv(train, schema, out_path(cfg, "train.csv"));

  nlohmann::ordered_json manifest;
  manifest["kind"] = "plant-bundle";
  manifest["template"] = opts.template_name;
  manifest["seed"] = cfg.seed;
  manifest["nodes"] = gen.size();
  manifest["truth_edges"] = bundle.truth_graph.edges.size();
  manifest["train_rows"] = opts.rows;
  nlohmann::ordered_json files = nlohmann::ordered_json::array(
      {"truth_graph.json", "truth_scm.json", "catalog.json", "schema.json", "train.csv"});

  std::printf("template %s  seed %llu  nodes %zu  truth edges %zu\n", opts.template_name.c_str(),
              static_cast<unsigned long long>(cfg.seed), gen.size(),
              bundle.truth_graph.edges.size());
  std::printf("wrote train.csv (%zu rows), schema.json, truth_graph.json, truth_scm.json, "
              "catalog.json\n",
              opts.rows);

  if (!opts.attacks.empty()) {
    PlantGenerator::Suite suite = gen.attack_suite(1);
    Schema labeled = schema_for(suite.frame, true);
    save_schema(labeled, out_path(cfg, "attack_schema.json"));
    write_csv(suite.frame, labeled, out_path(cfg, "attacks.csv"));
    save_episodes_json(suite.episodes, out_path(cfg, "episodes.json"));
    manifest["attack_suite"] = opts.attacks;
    manifest["attack_rows"] = suite.frame.rows();
    manifest["episodes"] = suite.episodes.size();
    for (const char* f : {"attack_schema.json", "attacks.csv", "episodes.json"}) {
      files.push_back(f);
    }
    std::printf("wrote attacks.csv (%zu rows, %zu episodes), attack_schema.json, episodes.json\n",
                suite.frame.rows(), suite.episodes.size());
  }

  if (opts.experiments) {
    PlantGenerator::ExperimentRun ex = gen.natural_experiments(2);
    write_csv(ex.frame, schema_for(ex.frame, ex.frame.labeled()), out_path(cfg, "experiments.csv"));
    save_experiments_json(ex.experiments, out_path(cfg, "experiments.json"));
    manifest["experiment_rows"] = ex.frame.rows();
    manifest["experiments"] = ex.experiments.size();
    files.push_back("experiments.csv");
    files.push_back("experiments.json");
    std::printf("wrote experiments.csv (%zu rows, %zu experiments), experiments.json\n",
                ex.frame.rows(), ex.experiments.size());
  }

  manifest["files"] = std::move(files);
  write_json(manifest, out_path(cfg, "manifest.json"));
}

}  // namespace

void register_synth(CLI::App& app, PipelineConfig& cfg) {
  CLI::App* cmd = app.add_subcommand("synth", "generate a synthetic plant bundle");
  auto opts = std::make_shared<SynthOptions>();
  cmd->add_option("--template", opts->template_name, "plant template name");
  cmd->add_option("--rows", opts->rows, "clean training rows")->check(CLI::PositiveNumber);
  cmd->add_option("--attacks", opts->attacks, "also emit the named attack suite stream");
  cmd->add_flag("--experiments", opts->experiments,
                "also emit the natural-experiment stream");
  add_seed_out(*cmd, cfg);
  attach_config(*cmd);
  cmd->callback([&cfg, opts] { run_synth(cfg, *opts); });
}

}  // namespace causaltwin::cli
