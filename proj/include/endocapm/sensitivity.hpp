#pragma once

#include <functional>

#include <Eigen/Core>

#include "endocapm/market.hpp"

namespace endocapm {

/// How the finite-difference oracle perturbs beta.
///
/// FrozenSystem perturbs one coordinate at a time while keeping the removed
/// row of the base point, which leaves the reduced system well defined off
/// the constraint surface; this validates the algebraic Jacobian formula.
/// Projected moves along e_j - w_j beta, which stays on w.beta = 1 and
/// measures the economically admissible directional derivative.
enum class FdMode { FrozenSystem, Projected };

struct SensitivityReport {
  Eigen::MatrixXd endogenous_jacobian;
  Eigen::MatrixXd standard_jacobian;
  Eigen::MatrixXd fd_jacobian;            // FrozenSystem mode
  Eigen::MatrixXd fd_projected_jacobian;  // Projected mode
  double step = 1e-6;
  /// Max-norm of endogenous_jacobian - fd_jacobian.
  double max_abs_deviation = 0.0;
  /// Largest off-diagonal magnitude of endogenous_jacobian.
  double off_diagonal_mass = 0.0;
  Eigen::Index removed_row = -1;
};

inline constexpr double kDefaultFdStep = 1e-6;

/// d mu / d beta for the endogenously consistent solution,
/// (mu_M - r) D^+ + (D^+ D - I) w mu^T D^+, with the reduced pseudoinverse
/// embedded back to N x N (zero column at the removed row). Generally
/// non-diagonal: one asset's risk moves every asset's return.
Eigen::MatrixXd endogenous_jacobian(const MarketParams& params);

/// d mu / d beta when the market return is held fixed: (mu_m - r) I.
Eigen::MatrixXd standard_jacobian(const MarketParams& params, double mu_m);

/// Central finite differences of an arbitrary beta -> mu map.
Eigen::MatrixXd fd_jacobian_of_map(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
    const Eigen::VectorXd& beta0, const Eigen::VectorXd& weights, double step,
    FdMode mode);

/// Central finite differences of the equilibrium solution, step > 0.
Eigen::MatrixXd fd_jacobian_oracle(const MarketParams& params, double step,
                                   FdMode mode);

/// Gradient of the market return mu_M with respect to beta, reduced to
/// closed form from the endogenous Jacobian; agrees with
/// endogenous_jacobian(params)^T w along every direction tangent to
/// w.beta = 1 (asserted in the tests).
Eigen::VectorXd market_return_gradient(const MarketParams& params);

SensitivityReport sensitivity_report(const MarketParams& params,
                                     double step = kDefaultFdStep);

}  // namespace endocapm
