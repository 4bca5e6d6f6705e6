#pragma once

#include <Eigen/Core>

#include "endocapm/errors.hpp"

namespace endocapm {

/// Absolute tolerance on the two market constraints, sum(w) = 1 and w.b = 1.
inline constexpr double kConstraintTol = 1e-12;

/// Closed interval used for beta search boxes.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

/// Snapshot of a market: portfolio weights, asset betas and the risk-free
/// rate. Weights are non-negative and sum to one; the weighted betas sum
/// to one as well (the market has beta one against itself).
struct MarketParams {
  Eigen::VectorXd weights;
  Eigen::VectorXd betas;
  double risk_free_rate = 0.0;

  Eigen::Index n_assets() const { return weights.size(); }
};

/// Checks all MarketParams invariants, naming the first failing index or
/// value. Returns the params unchanged on success.
MarketParams validate_market(MarketParams params);

/// w . mu
double market_return(const MarketParams& params, const Eigen::VectorXd& mu);

/// Entrywise pricing-equation residual mu - r - beta (w.mu - r). A return
/// vector solves the model iff this is zero.
Eigen::VectorXd capm_residual(const MarketParams& params,
                              const Eigen::VectorXd& mu);

}  // namespace endocapm
