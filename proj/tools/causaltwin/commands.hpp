#pragma once

#include <CLI11.hpp>

#include "config.hpp"

namespace causaltwin::cli {

// Each register function adds one subcommand and its callback. The callback
// runs inside App::parse; library errors propagate to main for the exit-code
// mapping (0 ok, 1 runtime, 2 usage/config).
void register_synth(CLI::App& app, PipelineConfig& cfg);
void register_discover(CLI::App& app, PipelineConfig& cfg);
void register_fit(CLI::App& app, PipelineConfig& cfg);
void register_detect(CLI::App& app, PipelineConfig& cfg);
void register_explain(CLI::App& app, PipelineConfig& cfg);
void register_whatif(CLI::App& app, PipelineConfig& cfg);
void register_eval(CLI::App& app, PipelineConfig& cfg);

}  // namespace causaltwin::cli
