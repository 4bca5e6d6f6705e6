#include "endocapm/market_structure.hpp"

#include <cmath>
#include <random>
#include <string>

namespace endocapm {

namespace {

void check_weights(const Eigen::VectorXd& weights) {
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) {
      throw Error(ErrorCode::NonFiniteInput,
                  "weights[" + std::to_string(i) + "] is not finite");
    }
    if (weights[i] < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "weights[" + std::to_string(i) + "] = " + std::to_string(weights[i]));
    }
  }
}

void check_bounds(Interval bounds) {
  if (!std::isfinite(bounds.lo) || !std::isfinite(bounds.hi) || bounds.lo > bounds.hi) {
    throw Error(ErrorCode::InfeasibleBounds,
                "bounds [" + std::to_string(bounds.lo) + ", " + std::to_string(bounds.hi) +
                    "] are empty or not finite");
  }
}

/// Uniform in [0, 1) from the raw engine output; the stdlib distribution
/// object is implementation-defined, this mapping is not.
double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double clamped_dot(const Eigen::VectorXd& beta, const Eigen::VectorXd& weights,
                   Interval bounds, double t) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    acc += weights[i] * bounds.clamp(beta[i] + t * weights[i]);
  }
  return acc;
}

}  // namespace

Eigen::VectorXd power_law_weights(const WeightLaw& law) {
  if (law.n_assets < 1) {
    throw Error(ErrorCode::ConfigError, "n_assets must be at least 1");
  }
  if (std::isnan(law.gamma) || law.gamma < 0.0) {
    throw Error(ErrorCode::ConfigError, "gamma must be >= 0");
  }
  const Eigen::Index n = law.n_assets;
  Eigen::VectorXd weights(n);
  if (std::isinf(law.gamma)) {
    weights.setZero();
    weights[0] = 1.0;
    return weights;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    weights[i] = std::pow(static_cast<double>(i + 1), -law.gamma);
  }
  weights /= weights.sum();
  return weights;
}

double normalized_hhi(const Eigen::VectorXd& weights) {
  const Eigen::Index n = weights.size();
  if (n < 2) {
    throw Error(ErrorCode::UndefinedForSingleAsset,
                "the normalized index needs N >= 2 (the denominator 1 - 1/N vanishes)");
  }
  check_weights(weights);
  if (weights.maxCoeff() == 1.0) {
    return 1.0;  // single dominant asset, exact by definition
  }
  // (w.w - 1/N) / (1 - 1/N) rewritten as a centered sum of squares, which
  // is exact at equal weights instead of leaving cancellation dust.
  const double mean = 1.0 / static_cast<double>(n);
  const double centered = (weights.array() - mean).square().sum();
  return centered / (1.0 - mean);
}

Eigen::VectorXd project_onto_constraint(const Eigen::VectorXd& beta,
                                        const Eigen::VectorXd& weights,
                                        Interval bounds) {
  check_bounds(bounds);
  if (!bounds.contains(1.0)) {
    throw Error(ErrorCode::InfeasibleBounds,
                "w.beta = 1 is unreachable inside [" + std::to_string(bounds.lo) + ", " +
                    std::to_string(bounds.hi) + "]");
  }
  const Eigen::Index n = beta.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = bounds.clamp(beta[i]);

  auto gap = [&](double t) { return clamped_dot(out, weights, bounds, t) - 1.0; };

  double g0 = gap(0.0);
  if (g0 != 0.0) {
    // g is non-decreasing and piecewise linear in t, so bisection is safe.
    double t_lo = 0.0, t_hi = 0.0;
    double span = 1.0;
    if (g0 < 0.0) {
      t_hi = span;
      while (gap(t_hi) < 0.0 && t_hi < 1e12) t_hi *= 2.0;
    } else {
      t_lo = -span;
      while (gap(t_lo) > 0.0 && t_lo > -1e12) t_lo *= 2.0;
    }
    for (int iter = 0; iter < 200 && t_hi - t_lo > 0.0; ++iter) {
      const double mid = 0.5 * (t_lo + t_hi);
      if (gap(mid) < 0.0) {
        t_lo = mid;
      } else {
        t_hi = mid;
      }
    }
    const double t = 0.5 * (t_lo + t_hi);
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] = bounds.clamp(out[i] + t * weights[i]);
    }
  }

  // Exact polish: spread the remaining gap over strictly interior
  // positively weighted coordinates.
  for (int round = 0; round < 4; ++round) {
    const double err = 1.0 - weights.dot(out);
    if (std::abs(err) <= 1e-14) break;
    double free_mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (weights[i] > 0.0 && out[i] > bounds.lo && out[i] < bounds.hi) {
        free_mass += weights[i] * weights[i];
      }
    }
    if (free_mass <= 0.0) break;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (weights[i] > 0.0 && out[i] > bounds.lo && out[i] < bounds.hi) {
        out[i] = bounds.clamp(out[i] + weights[i] * err / free_mass);
      }
    }
  }
  return out;
}

Eigen::VectorXd sample_constrained_beta(const Eigen::VectorXd& weights,
                                        Interval bounds, std::uint64_t seed) {
  check_weights(weights);
  check_bounds(bounds);
  if (bounds.lo > 1.0 || bounds.hi < 1.0) {
    // With w >= 0 and sum(w) = 1 the reachable w.beta interval is the box.
    throw Error(ErrorCode::InfeasibleBounds,
                "min achievable w.beta = " + std::to_string(bounds.lo) +
                    ", max = " + std::to_string(bounds.hi) + ", need 1");
  }
  const Eigen::Index n = weights.size();
  std::mt19937_64 engine(seed);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::VectorXd beta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      beta[i] = bounds.lo + (bounds.hi - bounds.lo) * uniform01(engine);
    }
    beta = project_onto_constraint(beta, weights, bounds);
    if (std::abs(weights.dot(beta) - 1.0) <= kConstraintTol) {
      return beta;
    }
  }
  throw Error(ErrorCode::InfeasibleBounds,
              "projection onto w.beta = 1 failed inside the box after 16 attempts");
}

}  // namespace endocapm
