#include "config.hpp"

#include <memory>
#include <vector>

#include <json.hpp>

namespace causaltwin::cli {
namespace {

// Flat JSON object -> CLI11 config items. Values are rendered back to the
// strings the option parsers expect; nested objects are rejected because the
// config contract is flat keys only.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::FileError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::FileError("config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      if (value.is_object() || value.is_array()) {
        throw CLI::FileError("config: key \"" + key + "\" is not a flat value");
      }
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_string()) {
        item.inputs = {value.get<std::string>()};
      } else if (value.is_boolean()) {
        item.inputs = {value.get<bool>() ? "true" : "false"};
      } else {
        item.inputs = {value.dump()};
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

}  // namespace

void attach_config(CLI::App& cmd) {
  cmd.config_formatter(std::make_shared<JsonConfig>());
  cmd.set_config("--config", "", "JSON config file (flat keys; flags override)");
}

void add_seed_out(CLI::App& cmd, PipelineConfig& cfg) {
  cmd.add_option("--seed", cfg.seed, "master seed for every derived stream");
  cmd.add_option("--out", cfg.out, "output directory (created if absent)");
}

void add_data_inputs(CLI::App& cmd, PipelineConfig& cfg, bool required) {
  CLI::Option* data = cmd.add_option("--data", cfg.data, "input CSV stream");
  CLI::Option* schema = cmd.add_option("--schema", cfg.schema, "column schema JSON");
  if (required) {
    data->required();
    schema->required();
  }
}

void add_discovery_params(CLI::App& cmd, PipelineConfig& cfg) {
  cmd.add_option("--tau", cfg.tau, "maximum lag of the augmented design")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--k", cfg.k, "per-target candidate cap")->check(CLI::PositiveNumber);
  cmd.add_option("--alpha", cfg.alpha, "CI significance level")
      ->check(CLI::Range(1e-12, 1.0));
  cmd.add_option("--bins", cfg.bins, "TDMI histogram bins")->check(CLI::Range(2, 1024));
}

void add_threshold_policy(CLI::App& cmd, PipelineConfig& cfg) {
  cmd.add_option("--threshold-policy", cfg.threshold_policy, "calibration policy")
      ->check(CLI::IsMember({"quantile", "maxf1"}));
  cmd.add_option("--quantile", cfg.quantile, "score quantile for the quantile policy")
      ->check(CLI::Range(0.0, 1.0));
}

}  // namespace causaltwin::cli
