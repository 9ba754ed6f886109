#include "util.hpp"

#include <filesystem>
#include <fstream>

#include "causaltwin/error.hpp"

namespace causaltwin::cli {

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
  std::filesystem::path dir(cfg.out.empty() ? "." : cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, Errc::IoError, "cannot create output directory " + dir.string());
  return (dir / name).string();
}

TimeSeriesFrame load_frame(const PipelineConfig& cfg) {
  const Schema schema = load_schema(cfg.schema);
  return ingest_csv(cfg.data, schema);
}

void require_matching_hash(const Scm& scm, const CausalGraph& graph) {
  require(scm.graph_hash == structure_hash(graph), Errc::ArtifactHashMismatch,
          "model was fitted on a different structure than this graph");
}

int variable_index(const TimeSeriesFrame& frame, const std::string& name) {
  const int idx = frame.index_of(name);
  require(idx >= 0, Errc::InvalidArgument, "unknown variable: " + name);
  return idx;
}

void write_json(const nlohmann::ordered_json& doc, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  require(out.good(), Errc::IoError, "write failed for " + path);
}

}  // namespace causaltwin::cli
