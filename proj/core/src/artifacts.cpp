#include "causaltwin/artifacts.hpp"

#include <fstream>

#include <json.hpp>

#include "causaltwin/error.hpp"

namespace causaltwin {

namespace {

using json = nlohmann::ordered_json;

json read_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ParseError, path + ": " + e.what());
  }
}

void write_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), Errc::IoError, "cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  require(out.good(), Errc::IoError, "write failed for " + path);
}

json variables_to_json(const std::vector<VariableMeta>& variables) {
  json arr = json::array();
  for (const VariableMeta& v : variables) {
    json item;
    item["name"] = v.name;
    item["kind"] = kind_name(v.kind);
    item["class"] = class_name(v.physical_class);
    item["stage"] = v.stage;
    item["active_states"] = v.active_states;
    arr.push_back(std::move(item));
  }
  return arr;
}

std::vector<VariableMeta> variables_from_json(const json& arr) {
  std::vector<VariableMeta> out;
  for (const json& item : arr) {
    VariableMeta v;
    v.name = item.at("name").get<std::string>();
    v.kind = kind_from_name(item.at("kind").get<std::string>());
    v.physical_class = class_from_name(item.at("class").get<std::string>());
    v.stage = item.at("stage").get<int>();
    v.active_states = item.at("active_states").get<std::vector<double>>();
    out.push_back(std::move(v));
  }
  return out;
}

template <typename Fn>
auto parse_as(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ParseError, path + ": " + e.what());
  }
}

}  // namespace

void save_graph_json(const CausalGraph& graph, const std::string& path) {
  json doc;
  doc["kind"] = "causal-graph";
  doc["tau"] = graph.tau;
  doc["variables"] = variables_to_json(graph.variables);
  json edges = json::array();
  for (const Edge& e : graph.edges) {
    json item;
    item["src"] = e.src_var;
    item["lag"] = e.src_lag;
    item["dst"] = e.dst_var;
    item["strength"] = e.strength;
    item["orientation"] = orientation_name(e.orientation_source);
    edges.push_back(std::move(item));
  }
  doc["edges"] = std::move(edges);
  json latents = json::array();
  for (const auto& [a, b] : graph.latent_pairs) latents.push_back(json::array({a, b}));
  doc["latent_pairs"] = std::move(latents);
  write_file(doc, path);
}

CausalGraph load_graph_json(const std::string& path) {
  const json doc = read_file(path);
  return parse_as(path, [&] {
    require(doc.at("kind").get<std::string>() == "causal-graph", Errc::ParseError,
            path + ": not a graph artifact");
    CausalGraph graph;
    graph.tau = doc.at("tau").get<int>();
    graph.variables = variables_from_json(doc.at("variables"));
    for (const json& item : doc.at("edges")) {
      Edge e;
      e.src_var = item.at("src").get<int>();
      e.src_lag = item.at("lag").get<int>();
      e.dst_var = item.at("dst").get<int>();
      e.strength = item.at("strength").get<double>();
      e.orientation_source = orientation_from_name(item.at("orientation").get<std::string>());
      graph.edges.push_back(e);
    }
    for (const json& pair : doc.at("latent_pairs")) {
      graph.latent_pairs.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    }
    graph.check();
    return graph;
  });
}

void save_scm_json(const Scm& scm, const std::string& path) {
  json doc;
  doc["kind"] = "scm";
  doc["tau"] = scm.tau;
  doc["graph_hash"] = scm.graph_hash;
  doc["variables"] = variables_to_json(scm.variables);
  json standardization = json::array();
  for (const Standardization& s : scm.standardization) {
    json item;
    item["mean"] = s.mean;
    item["stddev"] = s.stddev;
    standardization.push_back(std::move(item));
  }
  doc["standardization"] = std::move(standardization);
  json equations = json::array();
  for (const StructuralEquation& eq : scm.equations) {
    json item;
    item["target"] = eq.target;
    item["form"] = eq.form == StructuralEquation::Form::Logistic ? "logistic" : "gaussian";
    json parents = json::array();
    for (const ColumnKey& key : eq.parents) parents.push_back(json::array({key.var, key.lag}));
    item["parents"] = std::move(parents);
    item["intercept"] = eq.intercept;
    item["beta"] = eq.beta;
    item["gamma"] = eq.gamma;
    item["sigma"] = eq.sigma;
    item["dropped_parents"] = eq.dropped_parents;
    item["quadratic_dropped"] = eq.quadratic_dropped;
    item["separation"] = eq.separation;
    item["ridge"] = eq.ridge;
    equations.push_back(std::move(item));
  }
  doc["equations"] = std::move(equations);
  write_file(doc, path);
}

Scm load_scm_json(const std::string& path) {
  const json doc = read_file(path);
  return parse_as(path, [&] {
    require(doc.at("kind").get<std::string>() == "scm", Errc::ParseError,
            path + ": not an scm artifact");
    Scm scm;
    scm.tau = doc.at("tau").get<int>();
    scm.graph_hash = doc.at("graph_hash").get<std::uint64_t>();
    scm.variables = variables_from_json(doc.at("variables"));
    for (const json& item : doc.at("standardization")) {
      scm.standardization.push_back(
          {item.at("mean").get<double>(), item.at("stddev").get<double>()});
    }
    for (const json& item : doc.at("equations")) {
      StructuralEquation eq;
      eq.target = item.at("target").get<int>();
      eq.form = item.at("form").get<std::string>() == "logistic"
                    ? StructuralEquation::Form::Logistic
                    : StructuralEquation::Form::GaussianAdditive;
      for (const json& key : item.at("parents")) {
        eq.parents.push_back({key.at(0).get<int>(), key.at(1).get<int>()});
      }
      eq.intercept = item.at("intercept").get<double>();
      eq.beta = item.at("beta").get<std::vector<double>>();
      eq.gamma = item.at("gamma").get<double>();
      eq.sigma = item.at("sigma").get<double>();
      eq.dropped_parents = item.at("dropped_parents").get<std::vector<int>>();
      eq.quadratic_dropped = item.at("quadratic_dropped").get<bool>();
      eq.separation = item.at("separation").get<bool>();
      eq.ridge = item.at("ridge").get<double>();
      scm.equations.push_back(std::move(eq));
    }
    require(scm.equations.size() == scm.variables.size() &&
                scm.standardization.size() == scm.variables.size(),
            Errc::ParseError, path + ": equation/variable count mismatch");
    return scm;
  });
}

void save_catalog_json(const ConstraintCatalog& catalog, const std::string& path) {
  json doc;
  doc["kind"] = "constraint-catalog";
  auto pairs = [](const std::vector<std::pair<PhysicalClass, PhysicalClass>>& list) {
    json arr = json::array();
    for (const auto& [src, dst] : list) {
      arr.push_back(json::array({class_name(src), class_name(dst)}));
    }
    return arr;
  };
  doc["class_precedence"] = pairs(catalog.class_precedence);
  doc["control_edges"] = pairs(catalog.control_edges);
  json forbidden = json::array();
  for (const auto& [src, dst] : catalog.forbidden_pairs) {
    forbidden.push_back(json::array({src, dst}));
  }
  doc["forbidden_pairs"] = std::move(forbidden);
  write_file(doc, path);
}

ConstraintCatalog load_catalog_json(const std::string& path) {
  const json doc = read_file(path);
  return parse_as(path, [&] {
    require(doc.at("kind").get<std::string>() == "constraint-catalog", Errc::ParseError,
            path + ": not a catalog artifact");
    ConstraintCatalog catalog;
    auto pairs = [&](const json& arr) {
      std::vector<std::pair<PhysicalClass, PhysicalClass>> out;
      for (const json& item : arr) {
        out.emplace_back(class_from_name(item.at(0).get<std::string>()),
                         class_from_name(item.at(1).get<std::string>()));
      }
      return out;
    };
    catalog.class_precedence = pairs(doc.at("class_precedence"));
    catalog.control_edges = pairs(doc.at("control_edges"));
    for (const json& item : doc.at("forbidden_pairs")) {
      catalog.forbidden_pairs.emplace_back(item.at(0).get<std::string>(),
                                           item.at(1).get<std::string>());
    }
    catalog.check();
    return catalog;
  });
}

void save_episodes_json(const std::vector<AttackEpisode>& episodes, const std::string& path) {
  json doc;
  doc["kind"] = "attack-manifest";
  json arr = json::array();
  for (const AttackEpisode& ep : episodes) {
    json item;
    item["id"] = ep.id;
    item["scenario"] = ep.kind;
    item["root_var"] = ep.root_var;
    item["targets"] = ep.targets;
    item["onset"] = ep.onset;
    item["end"] = ep.end;
    json success;
    success["var"] = ep.success.var;
    success["lo"] = ep.success.lo;
    success["hi"] = ep.success.hi;
    success["min_steps"] = ep.success.min_steps;
    item["success"] = std::move(success);
    arr.push_back(std::move(item));
  }
  doc["episodes"] = std::move(arr);
  write_file(doc, path);
}

std::vector<AttackEpisode> load_episodes_json(const std::string& path) {
  const json doc = read_file(path);
  return parse_as(path, [&] {
    require(doc.at("kind").get<std::string>() == "attack-manifest", Errc::ParseError,
            path + ": not an attack manifest");
    std::vector<AttackEpisode> out;
    for (const json& item : doc.at("episodes")) {
      AttackEpisode ep;
      ep.id = item.at("id").get<int>();
      ep.kind = item.at("scenario").get<std::string>();
      ep.root_var = item.at("root_var").get<int>();
      ep.targets = item.at("targets").get<std::vector<int>>();
      ep.onset = item.at("onset").get<std::size_t>();
      ep.end = item.at("end").get<std::size_t>();
      const json& success = item.at("success");
      ep.success.var = success.at("var").get<int>();
      ep.success.lo = success.at("lo").get<double>();
      ep.success.hi = success.at("hi").get<double>();
      ep.success.min_steps = success.at("min_steps").get<std::size_t>();
      out.push_back(std::move(ep));
    }
    return out;
  });
}

void save_experiments_json(const std::vector<NaturalExperiment>& experiments,
                           const std::string& path) {
  json doc;
  doc["kind"] = "natural-experiments";
  json arr = json::array();
  for (const NaturalExperiment& ex : experiments) {
    json item;
    item["treatment"] = ex.treatment;
    item["forced_value"] = ex.forced_value;
    item["counterfactual_value"] = ex.counterfactual_value;
    item["outcome"] = ex.outcome;
    item["begin"] = ex.begin;
    item["end"] = ex.end;
    arr.push_back(std::move(item));
  }
  doc["experiments"] = std::move(arr);
  write_file(doc, path);
}

std::vector<NaturalExperiment> load_experiments_json(const std::string& path) {
  const json doc = read_file(path);
  return parse_as(path, [&] {
    require(doc.at("kind").get<std::string>() == "natural-experiments", Errc::ParseError,
            path + ": not an experiment manifest");
    std::vector<NaturalExperiment> out;
    for (const json& item : doc.at("experiments")) {
      NaturalExperiment ex;
      ex.treatment = item.at("treatment").get<int>();
      ex.forced_value = item.at("forced_value").get<double>();
      ex.counterfactual_value = item.at("counterfactual_value").get<double>();
      ex.outcome = item.at("outcome").get<int>();
      ex.begin = item.at("begin").get<std::size_t>();
      ex.end = item.at("end").get<std::size_t>();
      out.push_back(ex);
    }
    return out;
  });
}

void save_detect_report_json(const DetectReport& report, double threshold,
                             const std::string& path, bool include_latency) {
  json doc;
  doc["kind"] = "detect-report";
  doc["threshold"] = threshold;
  doc["steps"] = report.steps;
  doc["warmup_steps"] = report.warmup_steps;
  doc["alarm_steps"] = report.alarm_steps;
  doc["peak_mcai"] = report.peak_mcai;
  json events = json::array();
  for (const AlarmEvent& ev : report.events) {
    json item;
    item["begin"] = ev.begin;
    item["end"] = ev.end;
    item["peak"] = ev.peak;
    item["peak_step"] = ev.peak_step;
    events.push_back(std::move(item));
  }
  doc["events"] = std::move(events);
  if (include_latency) {
    json latency;
    latency["mean_us"] = report.latency_mean_us;
    latency["p50_us"] = report.latency_p50_us;
    latency["p99_us"] = report.latency_p99_us;
    doc["latency"] = std::move(latency);
  }
  write_file(doc, path);
}

void save_rankings_json(const std::vector<RootCauseRanking>& rankings,
                        const std::string& path, bool include_timing) {
  json doc;
  doc["kind"] = "root-cause-rankings";
  json arr = json::array();
  for (const RootCauseRanking& r : rankings) {
    json item;
    item["onset"] = r.onset;
    item["end"] = r.end;
    item["seed"] = r.seed;
    item["exact"] = r.exact;
    item["fallback_candidates"] = r.fallback_candidates;
    item["efficiency_correction"] = r.efficiency_correction;
    item["rescaled"] = r.rescaled;
    item["evaluations"] = r.evaluations;
    json entries = json::array();
    for (const RankingEntry& e : r.entries) {
      json entry;
      entry["var"] = e.var;
      entry["ce"] = e.ce;
      entry["phi"] = e.phi;
      entries.push_back(std::move(entry));
    }
    item["entries"] = std::move(entries);
    if (include_timing) item["attribution_seconds"] = r.attribution_seconds;
    arr.push_back(std::move(item));
  }
  doc["rankings"] = std::move(arr);
  write_file(doc, path);
}

void save_portfolio_json(const std::vector<DefenseOutcome>& portfolio,
                         const std::string& path) {
  json doc;
  doc["kind"] = "defense-portfolio";
  json arr = json::array();
  for (const DefenseOutcome& d : portfolio) {
    json item;
    item["name"] = d.name;
    item["cost"] = static_cast<int>(d.cost);
    item["attacks_total"] = d.attacks_total;
    item["attacks_prevented"] = d.attacks_prevented;
    item["no_trigger"] = d.no_trigger;
    item["success_rate_reduction"] = d.success_rate_reduction;
    item["srr_ci_low"] = d.srr_ci_low;
    item["srr_ci_high"] = d.srr_ci_high;
    item["mean_blocked_probability"] = d.mean_blocked_probability;
    item["roi"] = d.roi;
    arr.push_back(std::move(item));
  }
  doc["portfolio"] = std::move(arr);
  write_file(doc, path);
}

}  // namespace causaltwin
