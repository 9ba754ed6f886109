#pragma once

#include <cstdint>
#include <string>

#include <CLI11.hpp>

namespace causaltwin::cli {

// Settings shared across subcommands. Each value resolves in precedence
// order: command-line flag, then --config JSON (flat keys named after the
// long flags), then the defaults below.
struct PipelineConfig {
  int tau = 5;
  int k = 10;
  double alpha = 0.05;
  int bins = 16;
  std::string threshold_policy = "quantile";  // quantile | maxf1
  double quantile = 0.995;
  std::uint64_t shapley_budget = 2000;
  std::uint64_t seed = 1;
  std::string data;
  std::string schema;
  std::string catalog;
  std::string out = ".";
};

// Wires --config into a subcommand with a flat-key JSON reader. Keys not
// matching an option of the running subcommand are ignored, so one file can
// configure the whole pipeline.
void attach_config(CLI::App& cmd);

// Common flag groups; commands attach only what they use so --help stays
// honest about each command's surface.
void add_seed_out(CLI::App& cmd, PipelineConfig& cfg);
void add_data_inputs(CLI::App& cmd, PipelineConfig& cfg, bool required);
void add_discovery_params(CLI::App& cmd, PipelineConfig& cfg);
void add_threshold_policy(CLI::App& cmd, PipelineConfig& cfg);

}  // namespace causaltwin::cli
