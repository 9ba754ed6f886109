#pragma once

#include <string>

#include <json.hpp>

#include "causaltwin/csv.hpp"
#include "causaltwin/frame.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/scm.hpp"

#include "config.hpp"

namespace causaltwin::cli {

// Creates the output directory and returns the path of a file inside it.
std::string out_path(const PipelineConfig& cfg, const std::string& name);

// Loads the schema and ingests the data CSV declared in the config.
TimeSeriesFrame load_frame(const PipelineConfig& cfg);

// Fails with ArtifactHashMismatch when the model was fitted on a different
// structure than the graph artifact provides.
void require_matching_hash(const Scm& scm, const CausalGraph& graph);

// Variable index by name; unknown names are a usage error.
int variable_index(const TimeSeriesFrame& frame, const std::string& name);

// Canonical report writer (2-space indent, trailing newline).
void write_json(const nlohmann::ordered_json& doc, const std::string& path);

}  // namespace causaltwin::cli
