#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "endocapm/feasibility.hpp"
#include "endocapm/market.hpp"
#include "endocapm/market_structure.hpp"

namespace endocapm {

enum class OutputFormat { Csv, Json };

struct InlineMarket {
  std::vector<double> weights;
  std::vector<double> betas;
};

/// One JSON document drives every subcommand. Exactly one of `market` /
/// `weight_law` may be present for solve and sensitivity; sweep takes an
/// optional `sweep_grid` (defaulting to WeightLawGrid::default_grid) and
/// limits only needs `n_large`.
struct ScenarioConfig {
  std::optional<InlineMarket> market;
  std::optional<WeightLaw> weight_law;
  std::optional<WeightLawGrid> sweep_grid;
  double risk_free_rate = 0.02;
  Interval beta_bounds{-10.0, 10.0};
  int n_starts = 64;
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
  int n_large = 1000;
  std::string output_path = "-";  // "-" writes to stdout
  std::optional<OutputFormat> output_format;
};

/// Parses and validates a config document. Throws ConfigError with the
/// offending field named.
ScenarioConfig parse_scenario_config(const std::string& json_text);

ScenarioConfig load_scenario_config(const std::string& path);

/// Builds the concrete market for solve/sensitivity: either the inline
/// vectors or power-law weights with a seeded constrained beta sample.
MarketParams realize_market(const ScenarioConfig& config);

}  // namespace endocapm
