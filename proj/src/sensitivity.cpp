#include "endocapm/sensitivity.hpp"

#include <cmath>
#include <string>

#include "endocapm/equilibrium.hpp"

namespace endocapm {

namespace {

/// Embeds the N x (N-1) reduced pseudoinverse into N x N by inserting a
/// zero column at the removed row, so D^+ rhs ignores the removed entry.
Eigen::MatrixXd embed_pseudoinverse(const Eigen::MatrixXd& pinv,
                                    Eigen::Index removed_row) {
  const Eigen::Index n = pinv.rows();
  Eigen::MatrixXd embedded = Eigen::MatrixXd::Zero(n, n);
  embedded.leftCols(removed_row) = pinv.leftCols(removed_row);
  embedded.rightCols(n - 1 - removed_row) = pinv.rightCols(n - 1 - removed_row);
  return embedded;
}

double max_off_diagonal(const Eigen::MatrixXd& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j) worst = std::max(worst, std::abs(m(i, j)));
    }
  }
  return worst;
}

}  // namespace

Eigen::MatrixXd endogenous_jacobian(const MarketParams& params) {
  const MarketParams p = validate_market(params);
  const Eigen::Index n = p.n_assets();
  const double r = p.risk_free_rate;

  const EquilibriumSolution sol = solve_equilibrium(p);
  if (sol.degenerate_single_asset || !sol.dropped_assets.empty()) {
    // Dropped assets neither move nor are priced; the single-asset value is
    // the constant limit mu = r. Surviving entries embed at their indices.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    if (!sol.degenerate_single_asset) {
      MarketParams act;
      std::vector<Eigen::Index> index;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (p.weights[i] > 0.0) index.push_back(i);
      }
      const Eigen::Index m = static_cast<Eigen::Index>(index.size());
      act.weights.resize(m);
      act.betas.resize(m);
      act.risk_free_rate = r;
      for (Eigen::Index k = 0; k < m; ++k) {
        act.weights[k] = p.weights[index[k]];
        act.betas[k] = p.betas[index[k]];
      }
      const Eigen::MatrixXd inner = endogenous_jacobian(act);
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
          jac(index[a], index[b]) = inner(a, b);
        }
      }
    }
    return jac;
  }

  const SystemMatrix sys = build_system_matrix(p);
  const Eigen::MatrixXd pinv =
      embed_pseudoinverse(reduced_pseudoinverse(sys), sys.removed_row);
  const Eigen::VectorXd rhs = (Eigen::VectorXd::Ones(n) - p.betas) * r;
  const Eigen::VectorXd mu = pinv * rhs;
  const double mu_m = p.weights.dot(mu);

  return (mu_m - r) * pinv +
         (pinv * sys.d - Eigen::MatrixXd::Identity(n, n)) *
             (p.weights * mu.transpose()) * pinv;
}

Eigen::MatrixXd standard_jacobian(const MarketParams& params, double mu_m) {
  if (!std::isfinite(mu_m)) {
    throw Error(ErrorCode::NonFiniteInput, "mu_m is not finite");
  }
  if (!std::isfinite(params.risk_free_rate)) {
    throw Error(ErrorCode::NonFiniteInput, "risk_free_rate is not finite");
  }
  const Eigen::Index n = params.n_assets();
  return (mu_m - params.risk_free_rate) * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd fd_jacobian_of_map(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
    const Eigen::VectorXd& beta0, const Eigen::VectorXd& weights, double step,
    FdMode mode) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::ConfigError, "finite-difference step must be positive");
  }
  const Eigen::Index n = beta0.size();
  Eigen::MatrixXd jac(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd dir;
    if (mode == FdMode::FrozenSystem) {
      dir = Eigen::VectorXd::Unit(n, j);
    } else {
      // e_j - w_j beta is tangent to the surface w.beta = 1.
      dir = Eigen::VectorXd::Unit(n, j) - weights[j] * beta0;
    }
    Eigen::VectorXd plus, minus;
    try {
      plus = map(beta0 + step * dir);
      minus = map(beta0 - step * dir);
    } catch (const Error& e) {
      throw Error(ErrorCode::PerturbationInfeasible,
                  "perturbing coordinate " + std::to_string(j) + ": " + e.what());
    }
    jac.col(j) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

Eigen::MatrixXd fd_jacobian_oracle(const MarketParams& params, double step,
                                   FdMode mode) {
  const MarketParams p = validate_market(params);
  if (p.n_assets() < 2) {
    throw Error(ErrorCode::UndefinedForSingleAsset,
                "finite differences need at least two assets");
  }
  if ((p.weights.array() <= 0.0).any()) {
    throw Error(ErrorCode::PerturbationInfeasible,
                "drop zero-weight assets before differentiating");
  }
  const Eigen::Index removed = build_system_matrix(p).removed_row;

  if (mode == FdMode::FrozenSystem) {
    auto frozen = [&](const Eigen::VectorXd& beta) {
      MarketParams q = p;
      q.betas = beta;
      return solve_frozen_system(q, removed);
    };
    return fd_jacobian_of_map(frozen, p.betas, p.weights, step, mode);
  }

  auto projected = [&](const Eigen::VectorXd& beta) {
    MarketParams q = p;
    q.betas = beta;
    // Rounding can leave w.beta a few ulp off the surface; snap it back.
    q.betas += p.weights * ((1.0 - p.weights.dot(q.betas)) / p.weights.squaredNorm());
    Eigen::VectorXd mu = solve_equilibrium(q).mu;
    return mu;
  };
  return fd_jacobian_of_map(projected, p.betas, p.weights, step, mode);
}

Eigen::VectorXd market_return_gradient(const MarketParams& params) {
  const MarketParams p = validate_market(params);
  const Eigen::Index n = p.n_assets();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);

  std::vector<Eigen::Index> index;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.weights[i] > 0.0) index.push_back(i);
  }
  if (index.size() < 2) {
    return grad;  // single-asset limit: mu_M = r is locally constant
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(index.size()));
  for (Eigen::Index k = 0; k < beta.size(); ++k) beta[k] = p.betas[index[k]];

  const double bb = beta.squaredNorm();
  if (!(bb > 0.0)) {
    throw Error(ErrorCode::ZeroBetaVector, "betas have zero norm");
  }
  // mu_M(beta) = r (1 - sum(beta) / beta.beta) along the constraint surface.
  const Eigen::VectorXd inner =
      p.risk_free_rate *
      (2.0 * beta.sum() / (bb * bb) * beta.array() - 1.0 / bb).matrix();
  for (Eigen::Index k = 0; k < beta.size(); ++k) grad[index[k]] = inner[k];
  return grad;
}

SensitivityReport sensitivity_report(const MarketParams& params, double step) {
  const MarketParams p = validate_market(params);
  SensitivityReport report;
  report.step = step;
  report.endogenous_jacobian = endogenous_jacobian(p);
  const EquilibriumSolution sol = solve_equilibrium(p);
  report.standard_jacobian = standard_jacobian(p, sol.market_return);
  report.fd_jacobian = fd_jacobian_oracle(p, step, FdMode::FrozenSystem);
  report.fd_projected_jacobian = fd_jacobian_oracle(p, step, FdMode::Projected);
  report.max_abs_deviation =
      (report.endogenous_jacobian - report.fd_jacobian).cwiseAbs().maxCoeff();
  report.off_diagonal_mass = max_off_diagonal(report.endogenous_jacobian);
  report.removed_row = sol.removed_row;
  return report;
}

}  // namespace endocapm
