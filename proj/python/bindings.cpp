#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "endocapm/commands.hpp"
#include "endocapm/equilibrium.hpp"
#include "endocapm/feasibility.hpp"
#include "endocapm/io.hpp"
#include "endocapm/market_structure.hpp"
#include "endocapm/sensitivity.hpp"

namespace py = pybind11;
using namespace endocapm;

namespace {

MarketParams make_params(const Eigen::VectorXd& weights, const Eigen::VectorXd& betas,
                         double r) {
  MarketParams params;
  params.weights = weights;
  params.betas = betas;
  params.risk_free_rate = r;
  return params;
}

FdMode fd_mode_from_string(const std::string& mode) {
  if (mode == "frozen") return FdMode::FrozenSystem;
  if (mode == "projected") return FdMode::Projected;
  throw Error(ErrorCode::ConfigError, "fd mode must be \"frozen\" or \"projected\"");
}

}  // namespace

PYBIND11_MODULE(_endocapm, m) {
  m.doc() = "Equilibrium asset returns with an endogenously consistent market return";

  py::register_exception<Error>(m, "EndocapmError");

  py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
      .def_readonly("mu", &EquilibriumSolution::mu)
      .def_readonly("market_return", &EquilibriumSolution::market_return)
      .def_readonly("capm_residual_norm", &EquilibriumSolution::capm_residual_norm)
      .def_readonly("removed_row", &EquilibriumSolution::removed_row)
      .def_readonly("min_norm_certificate", &EquilibriumSolution::min_norm_certificate)
      .def_readonly("dropped_assets", &EquilibriumSolution::dropped_assets)
      .def_readonly("degenerate_single_asset",
                    &EquilibriumSolution::degenerate_single_asset);

  py::class_<SolutionFamily>(m, "SolutionFamily")
      .def_readonly("base_point", &SolutionFamily::base_point)
      .def_readonly("direction", &SolutionFamily::direction)
      .def_readonly("min_norm_parameter", &SolutionFamily::min_norm_parameter)
      .def("member", &SolutionFamily::member, py::arg("t"));

  py::class_<RangeResult>(m, "RangeResult")
      .def_readonly("mu_max_over_r", &RangeResult::mu_max_over_r)
      .def_readonly("mu_min_over_r", &RangeResult::mu_min_over_r)
      .def_readonly("argmax_beta", &RangeResult::argmax_beta)
      .def_readonly("argmin_beta", &RangeResult::argmin_beta)
      .def_readonly("n_starts", &RangeResult::n_starts)
      .def_readonly("converged_max", &RangeResult::converged_max)
      .def_readonly("converged_min", &RangeResult::converged_min);

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("gamma", &SweepRecord::gamma)
      .def_readonly("n_assets", &SweepRecord::n_assets)
      .def_readonly("hhi", &SweepRecord::hhi)
      .def_readonly("mu_max_over_r", &SweepRecord::mu_max_over_r)
      .def_readonly("mu_min_over_r", &SweepRecord::mu_min_over_r)
      .def_readonly("n_starts", &SweepRecord::n_starts)
      .def_readonly("converged_max", &SweepRecord::converged_max)
      .def_readonly("converged_min", &SweepRecord::converged_min)
      .def_readonly("seed", &SweepRecord::seed)
      .def_readonly("error", &SweepRecord::error);

  m.def(
      "solve_equilibrium",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r) {
        return solve_equilibrium(make_params(weights, betas, r));
      },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"),
      "Minimum-norm equilibrium returns; zero-weight assets come back as NaN.");

  m.def(
      "capm_residual",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r,
         const Eigen::VectorXd& mu) {
        return capm_residual(make_params(weights, betas, r), mu);
      },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"), py::arg("mu"));

  m.def(
      "market_return",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r,
         const Eigen::VectorXd& mu) {
        return market_return(make_params(weights, betas, r), mu);
      },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"), py::arg("mu"));

  m.def(
      "solution_family",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r) {
        return solution_family_oracle(make_params(weights, betas, r));
      },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"));

  m.def(
      "endogenous_jacobian",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r) {
        return endogenous_jacobian(make_params(weights, betas, r));
      },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"));

  m.def(
      "standard_jacobian",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r,
         double mu_m) { return standard_jacobian(make_params(weights, betas, r), mu_m); },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"), py::arg("mu_m"));

  m.def(
      "fd_jacobian",
      [](const Eigen::VectorXd& weights, const Eigen::VectorXd& betas, double r,
         double step, const std::string& mode) {
        return fd_jacobian_oracle(make_params(weights, betas, r), step,
                                  fd_mode_from_string(mode));
      },
      py::arg("weights"), py::arg("betas"), py::arg("risk_free_rate"),
      py::arg("step") = kDefaultFdStep, py::arg("mode") = "frozen");

  m.def(
      "power_law_weights",
      [](double gamma, int n_assets) {
        return power_law_weights(WeightLaw{gamma, n_assets});
      },
      py::arg("gamma"), py::arg("n_assets"));

  m.def("normalized_hhi", &normalized_hhi, py::arg("weights"));

  m.def(
      "sample_constrained_beta",
      [](const Eigen::VectorXd& weights, double lo, double hi, std::uint64_t seed) {
        return sample_constrained_beta(weights, Interval{lo, hi}, seed);
      },
      py::arg("weights"), py::arg("lo"), py::arg("hi"), py::arg("seed"));

  m.def(
      "optimize_return_range",
      [](const Eigen::VectorXd& weights, double r, double lo, double hi, int n_starts,
         std::uint64_t seed) {
        return optimize_return_range(weights, r, Interval{lo, hi}, n_starts, seed);
      },
      py::arg("weights"), py::arg("risk_free_rate"), py::arg("lo") = -10.0,
      py::arg("hi") = 10.0, py::arg("n_starts") = 64, py::arg("seed") = 0);

  m.def(
      "sweep_concentration",
      [](const std::vector<double>& gammas, const std::vector<int>& n_assets, double r,
         double lo, double hi, int n_starts, std::uint64_t seed, int threads) {
        WeightLawGrid grid;
        grid.gammas = gammas;
        grid.n_assets = n_assets;
        return sweep_concentration(grid, r, Interval{lo, hi}, n_starts, seed, threads);
      },
      py::arg("gammas"), py::arg("n_assets"), py::arg("risk_free_rate"),
      py::arg("lo") = -10.0, py::arg("hi") = 10.0, py::arg("n_starts") = 64,
      py::arg("seed") = 0, py::arg("threads") = 0);

  m.def("default_grid", []() {
    const WeightLawGrid grid = WeightLawGrid::default_grid();
    return py::make_tuple(grid.gammas, grid.n_assets);
  });

  m.def("sweep_records_to_csv", &sweep_records_to_csv, py::arg("records"));
}
