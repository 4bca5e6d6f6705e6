#pragma once

#include <vector>

#include <Eigen/Core>

#include "endocapm/market.hpp"

namespace endocapm {

/// Singular values below kRankRelTol times the largest one count as zero.
inline constexpr double kRankRelTol = 1e-10;

/// The singular pricing system D = I - beta w^T together with the reduced
/// full-row-rank matrix obtained by deleting one redundant row.
struct SystemMatrix {
  Eigen::MatrixXd d;
  Eigen::MatrixXd reduced;
  Eigen::Index removed_row = -1;
  Eigen::Index rank_estimate = 0;
};

struct EquilibriumSolution {
  /// Expected returns; NaN for assets dropped because their weight is zero.
  Eigen::VectorXd mu;
  double market_return = 0.0;
  /// Max-norm of the pricing-equation residual over the solved assets,
  /// including the equation whose row was removed from the system.
  double capm_residual_norm = 0.0;
  /// Original index of the removed row; -1 in the single-asset case.
  Eigen::Index removed_row = -1;
  /// beta . mu over the solved assets; zero for the minimum-norm member.
  double min_norm_certificate = 0.0;
  std::vector<Eigen::Index> dropped_assets;
  /// True when the value is the documented single-asset limit mu_i = r
  /// rather than a pseudoinverse output.
  bool degenerate_single_asset = false;
};

/// The consistent return vectors form a one-dimensional affine family
/// (1 - beta) r + t beta; the market return of the member at t is t itself.
/// Serves as an independent check on the pseudoinverse solution, which is
/// the minimum-norm member at t = min_norm_parameter.
struct SolutionFamily {
  Eigen::VectorXd base_point;
  Eigen::VectorXd direction;
  double min_norm_parameter = 0.0;

  Eigen::VectorXd member(double t) const {
    return base_point + t * direction;
  }
};

/// Builds D = I - beta w^T, estimates its numerical rank and removes one
/// row (largest weight first, falling back to the other rows if the
/// reduction loses rank). Throws RankDeficiencyBeyondOne when the rank is
/// below N-1, which signals duplicated or degenerate assets.
SystemMatrix build_system_matrix(const MarketParams& params);

/// D_r^T (D_r D_r^T)^{-1} via a Cholesky solve of the Gram matrix, with an
/// SVD fallback. The result is a right inverse of sys.reduced.
Eigen::MatrixXd reduced_pseudoinverse(const SystemMatrix& sys);

/// Solves (I - beta w^T) mu = (1 - beta) r for the minimum-norm return
/// vector. Zero-weight assets are dropped first and reported as NaN; a
/// market that reduces to a single asset gets the documented limit mu = r.
EquilibriumSolution solve_equilibrium(const MarketParams& params);

/// Same as solve_equilibrium but forcing the removed row (original index).
/// The row must belong to a positively weighted asset.
EquilibriumSolution solve_equilibrium_with_row(const MarketParams& params,
                                               Eigen::Index removed_row);

/// Evaluates mu(beta) = D_r^+ rhs_r with the given row frozen out and no
/// constraint checks, so the map stays well defined slightly off the
/// surface w.beta = 1. Used by the finite-difference sensitivity oracle.
Eigen::VectorXd solve_frozen_system(const MarketParams& params,
                                    Eigen::Index removed_row);

SolutionFamily solution_family_oracle(const MarketParams& params);

}  // namespace endocapm
