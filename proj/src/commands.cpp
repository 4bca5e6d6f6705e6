#include "endocapm/commands.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>

#include <json.hpp>

#include "endocapm/equilibrium.hpp"
#include "endocapm/io.hpp"
#include "endocapm/sensitivity.hpp"

namespace endocapm {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

void emit(const ScenarioConfig& config, const std::string& content) {
  if (config.output_path == "-") {
    std::cout << content;
    return;
  }
  write_file_atomic(config.output_path, content);
}

int run_guarded(const char* command, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << command << " error: " << e.what() << "\n";
    return e.is_validation() ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << command << " error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

OutputFormat effective_format(const ScenarioConfig& config, OutputFormat fallback) {
  return config.output_format.value_or(fallback);
}

std::string csv_scalar_row(const std::string& name, double value) {
  return name + ",,," + format_double(value) + "\n";
}

std::string matrix_to_csv_rows(const std::string& name, const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += name + "," + std::to_string(i) + "," + std::to_string(j) + "," +
             format_double(m(i, j)) + "\n";
    }
  }
  return out;
}

json market_to_json(const MarketParams& params) {
  return json{{"n_assets", params.n_assets()},
              {"risk_free_rate", params.risk_free_rate},
              {"weights", vector_to_json(params.weights)},
              {"betas", vector_to_json(params.betas)}};
}

}  // namespace

int sweep_threads_from_env() {
  const char* raw = std::getenv("ENDO_CAPM_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const int value = std::stoi(raw);
    return value > 0 ? value : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

int cmd_solve(const ScenarioConfig& config) {
  return run_guarded("solve", [&]() {
    const MarketParams params = realize_market(config);
    const EquilibriumSolution sol = solve_equilibrium(params);

    if (effective_format(config, OutputFormat::Json) == OutputFormat::Json) {
      json doc = market_to_json(params);
      doc["mu"] = vector_to_json(sol.mu);
      doc["market_return"] = sol.market_return;
      doc["capm_residual_norm"] = sol.capm_residual_norm;
      doc["removed_row"] = sol.removed_row;
      doc["min_norm_certificate"] = sol.min_norm_certificate;
      doc["dropped_assets"] = sol.dropped_assets;
      doc["degenerate_single_asset"] = sol.degenerate_single_asset;
      emit(config, doc.dump(2) + "\n");
      return;
    }

    std::string csv =
        "asset,weight,beta,mu,market_return,capm_residual_norm,removed_row,"
        "min_norm_certificate\n";
    for (Eigen::Index i = 0; i < params.n_assets(); ++i) {
      csv += std::to_string(i) + "," + format_double(params.weights[i]) + "," +
             format_double(params.betas[i]) + "," + format_double(sol.mu[i]) + "," +
             format_double(sol.market_return) + "," +
             format_double(sol.capm_residual_norm) + "," +
             std::to_string(sol.removed_row) + "," +
             format_double(sol.min_norm_certificate) + "\n";
    }
    emit(config, csv);
  });
}

int cmd_sensitivity(const ScenarioConfig& config) {
  return run_guarded("sensitivity", [&]() {
    const MarketParams params = realize_market(config);
    const SensitivityReport report = sensitivity_report(params, config.fd_step);

    if (effective_format(config, OutputFormat::Json) == OutputFormat::Json) {
      json doc = market_to_json(params);
      doc["step"] = report.step;
      doc["endogenous_jacobian"] = matrix_to_json(report.endogenous_jacobian);
      doc["standard_jacobian"] = matrix_to_json(report.standard_jacobian);
      doc["fd_jacobian"] = matrix_to_json(report.fd_jacobian);
      doc["fd_projected_jacobian"] = matrix_to_json(report.fd_projected_jacobian);
      doc["max_abs_deviation"] = report.max_abs_deviation;
      doc["off_diagonal_mass"] = report.off_diagonal_mass;
      doc["removed_row"] = report.removed_row;
      emit(config, doc.dump(2) + "\n");
      return;
    }

    std::string csv = "quantity,row,col,value\n";
    csv += matrix_to_csv_rows("endogenous_jacobian", report.endogenous_jacobian);
    csv += matrix_to_csv_rows("standard_jacobian", report.standard_jacobian);
    csv += matrix_to_csv_rows("fd_jacobian", report.fd_jacobian);
    csv += matrix_to_csv_rows("fd_projected_jacobian", report.fd_projected_jacobian);
    csv += csv_scalar_row("step", report.step);
    csv += csv_scalar_row("max_abs_deviation", report.max_abs_deviation);
    csv += csv_scalar_row("off_diagonal_mass", report.off_diagonal_mass);
    csv += csv_scalar_row("removed_row", static_cast<double>(report.removed_row));
    emit(config, csv);
  });
}

int cmd_sweep(const ScenarioConfig& config) {
  return run_guarded("sweep", [&]() {
    if (config.market) {
      throw Error(ErrorCode::ConfigError,
                  "sweep runs over a weight-law grid, not an inline market");
    }
    const WeightLawGrid grid = config.sweep_grid.value_or(WeightLawGrid::default_grid());
    const std::vector<SweepRecord> records =
        sweep_concentration(grid, config.risk_free_rate, config.beta_bounds,
                            config.n_starts, config.seed, sweep_threads_from_env());
    for (const SweepRecord& rec : records) {
      if (!rec.error.empty()) {
        std::cerr << "sweep point gamma=" << format_double(rec.gamma)
                  << " n=" << rec.n_assets << " failed: " << rec.error << "\n";
      }
    }

    if (effective_format(config, OutputFormat::Csv) == OutputFormat::Csv) {
      emit(config, sweep_records_to_csv(records));
      return;
    }

    json doc;
    doc["risk_free_rate"] = config.risk_free_rate;
    doc["beta_bounds"] = {config.beta_bounds.lo, config.beta_bounds.hi};
    doc["n_starts"] = config.n_starts;
    doc["seed"] = config.seed;
    json rows = json::array();
    for (const SweepRecord& rec : records) {
      json row{{"gamma", rec.gamma},
               {"n_assets", rec.n_assets},
               {"hhi", rec.hhi},
               {"mu_max_over_r", rec.mu_max_over_r},
               {"mu_min_over_r", rec.mu_min_over_r},
               {"n_starts", rec.n_starts},
               {"converged_max", rec.converged_max},
               {"converged_min", rec.converged_min},
               {"seed", rec.seed}};
      if (!rec.error.empty()) row["error"] = rec.error;
      rows.push_back(row);
    }
    doc["records"] = rows;
    emit(config, doc.dump(2) + "\n");
  });
}

int cmd_limits(const ScenarioConfig& config) {
  return run_guarded("limits", [&]() {
    if (effective_format(config, OutputFormat::Json) != OutputFormat::Json) {
      throw Error(ErrorCode::ConfigError, "the limits report is JSON only");
    }
    const LimitReport report = limiting_case_report(
        config.risk_free_rate, config.n_large, config.beta_bounds, config.seed);

    json homogeneous = json::array();
    for (const HomogeneousCase& item : report.homogeneous) {
      homogeneous.push_back({{"n_assets", item.n_assets},
                             {"max_abs_mu", item.max_abs_mu},
                             {"market_return", item.market_return},
                             {"pass", item.pass}});
    }
    json doc{
        {"risk_free_rate", report.risk_free_rate},
        {"n_large", report.n_large},
        {"homogeneous_betas", homogeneous},
        {"single_dominant_asset",
         {{"n_assets", report.single_dominant.n_assets},
          {"mu_m_over_r", report.single_dominant.mu_m_over_r},
          {"documented_limit", report.single_dominant.documented_limit},
          {"pass", report.single_dominant.pass}}},
        {"equal_weight_large_n",
         {{"n_assets", report.equal_weight.n_assets},
          {"seed", report.equal_weight.seed},
          {"computed_mu_m_over_r", report.equal_weight.computed_mu_m_over_r},
          {"family_mu_m_over_r", report.equal_weight.family_mu_m_over_r},
          {"claimed_mu_m_over_r", report.equal_weight.claimed_mu_m_over_r},
          {"status", report.equal_weight.status},
          {"note", report.equal_weight.note}}},
        {"atomistic_bound",
         {{"n_assets", report.atomistic.n_assets},
          {"beta_cap", report.atomistic.beta_cap},
          {"bound", report.atomistic.bound},
          {"measured", report.atomistic.measured},
          {"pass", report.atomistic.pass}}},
        {"commentary", report.commentary},
    };
    emit(config, doc.dump(2) + "\n");
  });
}

}  // namespace endocapm
