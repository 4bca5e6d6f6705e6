#include "endocapm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace endocapm {

namespace {

using nlohmann::json;

double parse_gamma(const json& value, const std::string& where) {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw Error(ErrorCode::ConfigError, where + ": expected a number or \"inf\"");
  }
  if (!value.is_number()) {
    throw Error(ErrorCode::ConfigError, where + ": expected a number or \"inf\"");
  }
  return value.get<double>();
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : doc.items()) {
    if (!allowed.count(item.key())) {
      throw Error(ErrorCode::ConfigError, where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

std::vector<double> number_array(const json& value, const std::string& where) {
  if (!value.is_array()) {
    throw Error(ErrorCode::ConfigError, where + ": expected an array of numbers");
  }
  std::vector<double> out;
  for (const auto& item : value) {
    if (!item.is_number()) {
      throw Error(ErrorCode::ConfigError, where + ": expected an array of numbers");
    }
    out.push_back(item.get<double>());
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  }
  reject_unknown_keys(doc,
                      {"market", "weight_law", "sweep_grid", "risk_free_rate",
                       "beta_bounds", "n_starts", "seed", "fd_step", "n_large",
                       "output_path", "output_format"},
                      "config");

  ScenarioConfig config;
  if (doc.contains("market")) {
    const json& market = doc["market"];
    reject_unknown_keys(market, {"weights", "betas"}, "market");
    if (!market.contains("weights") || !market.contains("betas")) {
      throw Error(ErrorCode::ConfigError, "market needs both \"weights\" and \"betas\"");
    }
    InlineMarket inline_market;
    inline_market.weights = number_array(market["weights"], "market.weights");
    inline_market.betas = number_array(market["betas"], "market.betas");
    config.market = std::move(inline_market);
  }
  if (doc.contains("weight_law")) {
    const json& law = doc["weight_law"];
    reject_unknown_keys(law, {"gamma", "n_assets"}, "weight_law");
    if (!law.contains("gamma") || !law.contains("n_assets")) {
      throw Error(ErrorCode::ConfigError, "weight_law needs \"gamma\" and \"n_assets\"");
    }
    WeightLaw weight_law;
    weight_law.gamma = parse_gamma(law["gamma"], "weight_law.gamma");
    weight_law.n_assets = law["n_assets"].get<int>();
    config.weight_law = weight_law;
  }
  if (config.market && config.weight_law) {
    throw Error(ErrorCode::ConfigError,
                "give either an inline market or a weight_law, not both");
  }
  if (doc.contains("sweep_grid")) {
    const json& grid = doc["sweep_grid"];
    reject_unknown_keys(grid, {"gammas", "n_assets"}, "sweep_grid");
    if (!grid.contains("gammas") || !grid.contains("n_assets")) {
      throw Error(ErrorCode::ConfigError, "sweep_grid needs \"gammas\" and \"n_assets\"");
    }
    WeightLawGrid parsed;
    if (!grid["gammas"].is_array() || !grid["n_assets"].is_array()) {
      throw Error(ErrorCode::ConfigError, "sweep_grid fields must be arrays");
    }
    for (const auto& item : grid["gammas"]) {
      parsed.gammas.push_back(parse_gamma(item, "sweep_grid.gammas"));
    }
    for (const auto& item : grid["n_assets"]) {
      if (!item.is_number_integer()) {
        throw Error(ErrorCode::ConfigError, "sweep_grid.n_assets must hold integers");
      }
      parsed.n_assets.push_back(item.get<int>());
    }
    config.sweep_grid = std::move(parsed);
  }
  if (doc.contains("risk_free_rate")) {
    config.risk_free_rate = doc["risk_free_rate"].get<double>();
  }
  if (doc.contains("beta_bounds")) {
    const auto bounds = number_array(doc["beta_bounds"], "beta_bounds");
    if (bounds.size() != 2) {
      throw Error(ErrorCode::ConfigError, "beta_bounds must be [lo, hi]");
    }
    config.beta_bounds = Interval{bounds[0], bounds[1]};
  }
  if (doc.contains("n_starts")) {
    config.n_starts = doc["n_starts"].get<int>();
    if (config.n_starts < 1) {
      throw Error(ErrorCode::ConfigError, "n_starts must be at least 1");
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw Error(ErrorCode::ConfigError, "seed must be a non-negative integer");
    }
    const auto seed = doc["seed"].get<std::int64_t>();
    if (seed < 0) {
      throw Error(ErrorCode::ConfigError, "seed must be a non-negative integer");
    }
    config.seed = static_cast<std::uint64_t>(seed);
  }
  if (doc.contains("fd_step")) {
    config.fd_step = doc["fd_step"].get<double>();
    if (!(config.fd_step > 0.0) || !std::isfinite(config.fd_step)) {
      throw Error(ErrorCode::ConfigError, "fd_step must be positive and finite");
    }
  }
  if (doc.contains("n_large")) {
    config.n_large = doc["n_large"].get<int>();
  }
  if (doc.contains("output_path")) {
    config.output_path = doc["output_path"].get<std::string>();
  }
  if (doc.contains("output_format")) {
    const std::string format = doc["output_format"].get<std::string>();
    if (format == "csv") {
      config.output_format = OutputFormat::Csv;
    } else if (format == "json") {
      config.output_format = OutputFormat::Json;
    } else {
      throw Error(ErrorCode::ConfigError,
                  "output_format must be \"csv\" or \"json\", got \"" + format + "\"");
    }
  }
  return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_scenario_config(buffer.str());
}

MarketParams realize_market(const ScenarioConfig& config) {
  MarketParams params;
  params.risk_free_rate = config.risk_free_rate;
  if (config.market && config.weight_law) {
    throw Error(ErrorCode::ConfigError,
                "give either an inline market or a weight_law, not both");
  }
  if (config.market) {
    params.weights = Eigen::Map<const Eigen::VectorXd>(
        config.market->weights.data(),
        static_cast<Eigen::Index>(config.market->weights.size()));
    params.betas = Eigen::Map<const Eigen::VectorXd>(
        config.market->betas.data(), static_cast<Eigen::Index>(config.market->betas.size()));
  } else if (config.weight_law) {
    params.weights = power_law_weights(*config.weight_law);
    params.betas = sample_constrained_beta(params.weights, config.beta_bounds, config.seed);
  } else {
    throw Error(ErrorCode::ConfigError,
                "this command needs an inline market or a weight_law");
  }
  return validate_market(params);
}

}  // namespace endocapm
