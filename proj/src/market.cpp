#include "endocapm/market.hpp"

#include <cmath>
#include <string>

namespace endocapm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::WeightsNotNormalized: return "WeightsNotNormalized";
    case ErrorCode::BetaConstraintViolated: return "BetaConstraintViolated";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RankDeficiencyBeyondOne: return "RankDeficiencyBeyondOne";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::ZeroBetaVector: return "ZeroBetaVector";
    case ErrorCode::UndefinedForSingleAsset: return "UndefinedForSingleAsset";
    case ErrorCode::InfeasibleBounds: return "InfeasibleBounds";
    case ErrorCode::PerturbationInfeasible: return "PerturbationInfeasible";
    case ErrorCode::NoFeasibleStart: return "NoFeasibleStart";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

MarketParams validate_market(MarketParams params) {
  const Eigen::Index n = params.weights.size();
  if (n < 1) {
    throw Error(ErrorCode::LengthMismatch, "market must contain at least one asset");
  }
  if (params.betas.size() != n) {
    throw Error(ErrorCode::LengthMismatch,
                "weights have length " + std::to_string(n) + " but betas have length " +
                    std::to_string(params.betas.size()));
  }
  if (!std::isfinite(params.risk_free_rate)) {
    throw Error(ErrorCode::NonFiniteInput, "risk_free_rate is not finite");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(params.weights[i])) {
      throw Error(ErrorCode::NonFiniteInput, "weights[" + std::to_string(i) + "] is not finite");
    }
    if (!std::isfinite(params.betas[i])) {
      throw Error(ErrorCode::NonFiniteInput, "betas[" + std::to_string(i) + "] is not finite");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (params.weights[i] < 0.0) {
      throw Error(ErrorCode::NegativeWeight, "weights[" + std::to_string(i) + "] = " +
                                                 std::to_string(params.weights[i]));
    }
  }
  const double weight_sum = params.weights.sum();
  if (std::abs(weight_sum - 1.0) > kConstraintTol) {
    throw Error(ErrorCode::WeightsNotNormalized,
                "sum(weights) = " + std::to_string(weight_sum));
  }
  const double weighted_beta = params.weights.dot(params.betas);
  if (std::abs(weighted_beta - 1.0) > kConstraintTol) {
    throw Error(ErrorCode::BetaConstraintViolated,
                "weights . betas = " + std::to_string(weighted_beta));
  }
  return params;
}

double market_return(const MarketParams& params, const Eigen::VectorXd& mu) {
  if (mu.size() != params.weights.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "mu has length " + std::to_string(mu.size()) + ", expected " +
                    std::to_string(params.weights.size()));
  }
  return params.weights.dot(mu);
}

Eigen::VectorXd capm_residual(const MarketParams& params, const Eigen::VectorXd& mu) {
  if (mu.size() != params.weights.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "mu has length " + std::to_string(mu.size()) + ", expected " +
                    std::to_string(params.weights.size()));
  }
  const double r = params.risk_free_rate;
  const double excess_market = params.weights.dot(mu) - r;
  return mu.array() - r - params.betas.array() * excess_market;
}

}  // namespace endocapm
