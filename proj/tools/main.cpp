// Command-line front end: solve | sensitivity | sweep | limits, each driven
// by a JSON config with optional flag overrides.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "endocapm/commands.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Path to the JSON scenario config")
      ->required();
  cmd->add_option("--out", opts.out_path, "Output path (overrides the config; '-' = stdout)");
  cmd->add_option("--format", opts.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "Seed override");
  cmd->add_option("--starts", opts.starts, "Multistart count override");
}

int run(const CommonOptions& opts,
        int (*command)(const endocapm::ScenarioConfig&)) {
  endocapm::ScenarioConfig config;
  try {
    config = endocapm::load_scenario_config(opts.config_path);
    if (!opts.out_path.empty()) config.output_path = opts.out_path;
    if (!opts.format.empty()) {
      config.output_format = opts.format == "csv" ? endocapm::OutputFormat::Csv
                                                  : endocapm::OutputFormat::Json;
    }
    if (opts.seed) config.seed = *opts.seed;
    if (opts.starts) config.n_starts = *opts.starts;
  } catch (const endocapm::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return endocapm::kExitValidation;
  }
  return command(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium asset returns with an endogenously consistent market return"};
  app.require_subcommand(1);

  CommonOptions solve_opts, sensitivity_opts, sweep_opts, limits_opts;
  CLI::App* solve = app.add_subcommand("solve", "Solve for the equilibrium return vector");
  add_common_options(solve, solve_opts);
  CLI::App* sensitivity =
      app.add_subcommand("sensitivity", "Jacobians of returns with respect to risk");
  add_common_options(sensitivity, sensitivity_opts);
  CLI::App* sweep =
      app.add_subcommand("sweep", "Supported return range over a concentration grid");
  add_common_options(sweep, sweep_opts);
  CLI::App* limits = app.add_subcommand("limits", "Limiting-case report");
  add_common_options(limits, limits_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : endocapm::kExitValidation;
  }

  if (solve->parsed()) return run(solve_opts, endocapm::cmd_solve);
  if (sensitivity->parsed()) return run(sensitivity_opts, endocapm::cmd_sensitivity);
  if (sweep->parsed()) return run(sweep_opts, endocapm::cmd_sweep);
  if (limits->parsed()) return run(limits_opts, endocapm::cmd_limits);
  return endocapm::kExitValidation;
}
