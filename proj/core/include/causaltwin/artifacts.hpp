#pragma once

#include <string>
#include <vector>

#include "causaltwin/defense.hpp"
#include "causaltwin/detect.hpp"
#include "causaltwin/graph.hpp"
#include "causaltwin/rootcause.hpp"
#include "causaltwin/scm.hpp"

namespace causaltwin {

// JSON artifact round-trips. Serialization is canonical (fixed key order,
// shortest round-trip number formatting), so identical inputs produce
// identical bytes. Wall-clock measurements are opt-in on the writers that
// have them and default off, keeping the default artifacts reproducible.

void save_graph_json(const CausalGraph& graph, const std::string& path);
CausalGraph load_graph_json(const std::string& path);

void save_scm_json(const Scm& scm, const std::string& path);
Scm load_scm_json(const std::string& path);

void save_catalog_json(const ConstraintCatalog& catalog, const std::string& path);
ConstraintCatalog load_catalog_json(const std::string& path);

void save_episodes_json(const std::vector<AttackEpisode>& episodes, const std::string& path);
std::vector<AttackEpisode> load_episodes_json(const std::string& path);

void save_experiments_json(const std::vector<NaturalExperiment>& experiments,
                           const std::string& path);
std::vector<NaturalExperiment> load_experiments_json(const std::string& path);

void save_detect_report_json(const DetectReport& report, double threshold,
                             const std::string& path, bool include_latency = false);

void save_rankings_json(const std::vector<RootCauseRanking>& rankings,
                        const std::string& path, bool include_timing = false);

void save_portfolio_json(const std::vector<DefenseOutcome>& portfolio,
                         const std::string& path);

}  // namespace causaltwin
