#include "endocapm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace endocapm {

namespace {

Eigen::MatrixXd drop_row(const Eigen::MatrixXd& m, Eigen::Index row) {
  Eigen::MatrixXd out(m.rows() - 1, m.cols());
  out.topRows(row) = m.topRows(row);
  out.bottomRows(m.rows() - 1 - row) = m.bottomRows(m.rows() - 1 - row);
  return out;
}

Eigen::VectorXd drop_entry(const Eigen::VectorXd& v, Eigen::Index idx) {
  Eigen::VectorXd out(v.size() - 1);
  out.head(idx) = v.head(idx);
  out.tail(v.size() - 1 - idx) = v.tail(v.size() - 1 - idx);
  return out;
}

bool has_full_row_rank(const Eigen::MatrixXd& reduced) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(reduced);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  return sv(sv.size() - 1) > kRankRelTol * sv(0);
}

/// Largest weight first, remaining rows by decreasing weight.
std::vector<Eigen::Index> row_preference(const Eigen::VectorXd& weights) {
  std::vector<Eigen::Index> order(weights.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return weights[a] > weights[b];
  });
  return order;
}

Eigen::MatrixXd svd_pseudoinverse(const Eigen::MatrixXd& m, Eigen::Index min_rank) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) {
    throw Error(ErrorCode::SingularGram, "reduced matrix is numerically zero");
  }
  const double cutoff = kRankRelTol * sv(0);
  Eigen::VectorXd inv = sv;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv(i) = 1.0 / sv(i);
      ++rank;
    } else {
      inv(i) = 0.0;
    }
  }
  if (rank < min_rank) {
    throw Error(ErrorCode::SingularGram,
                "reduced Gram matrix is singular at working tolerance (rank " +
                    std::to_string(rank) + " of " + std::to_string(min_rank) + ")");
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct ActiveMarket {
  MarketParams params;                      // positively weighted assets only
  std::vector<Eigen::Index> index;          // active -> original index
  std::vector<Eigen::Index> dropped;        // original indices with weight 0
};

ActiveMarket eliminate_zero_weights(const MarketParams& params) {
  ActiveMarket act;
  const Eigen::Index n = params.n_assets();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (params.weights[i] > 0.0) {
      act.index.push_back(i);
    } else {
      act.dropped.push_back(i);
    }
  }
  const Eigen::Index m = static_cast<Eigen::Index>(act.index.size());
  act.params.weights.resize(m);
  act.params.betas.resize(m);
  act.params.risk_free_rate = params.risk_free_rate;
  for (Eigen::Index k = 0; k < m; ++k) {
    act.params.weights[k] = params.weights[act.index[k]];
    act.params.betas[k] = params.betas[act.index[k]];
  }
  return act;
}

SystemMatrix build_active_system(const MarketParams& params,
                                 std::optional<Eigen::Index> forced_row) {
  const Eigen::Index n = params.n_assets();
  SystemMatrix sys;
  sys.d = Eigen::MatrixXd::Identity(n, n) - params.betas * params.weights.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.d);
  const auto& sv = svd.singularValues();
  sys.rank_estimate = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    const double cutoff = kRankRelTol * sv(0);
    sys.rank_estimate = (sv.array() > cutoff).count();
  }
  if (n == 1) {
    sys.removed_row = 0;
    sys.reduced.resize(0, 1);
    return sys;
  }
  if (sys.rank_estimate < n - 1) {
    throw Error(ErrorCode::RankDeficiencyBeyondOne,
                "numerical rank " + std::to_string(sys.rank_estimate) + " < N-1 = " +
                    std::to_string(n - 1) + "; deduplicate the assets first");
  }

  std::vector<Eigen::Index> candidates;
  if (forced_row) {
    candidates.push_back(*forced_row);
  } else {
    candidates = row_preference(params.weights);
  }
  for (Eigen::Index row : candidates) {
    Eigen::MatrixXd reduced = drop_row(sys.d, row);
    if (has_full_row_rank(reduced)) {
      sys.removed_row = row;
      sys.reduced = std::move(reduced);
      return sys;
    }
    if (forced_row) {
      throw Error(ErrorCode::RankDeficiencyBeyondOne,
                  "removing row " + std::to_string(row) + " leaves a rank-deficient system");
    }
  }
  throw Error(ErrorCode::RankDeficiencyBeyondOne,
              "no single row removal yields a full-row-rank system");
}

EquilibriumSolution solve_active(const MarketParams& act,
                                 std::optional<Eigen::Index> forced_row) {
  EquilibriumSolution sol;
  const Eigen::Index n = act.n_assets();
  const double r = act.risk_free_rate;

  if (n == 1) {
    // w = e_i forces beta_i = 1 and D = 0; the documented limit is mu_i = r.
    sol.mu = Eigen::VectorXd::Constant(1, r);
    sol.market_return = r;
    sol.capm_residual_norm = 0.0;
    sol.removed_row = -1;
    sol.min_norm_certificate = act.betas[0] * r;
    sol.degenerate_single_asset = true;
    return sol;
  }

  SystemMatrix sys = build_active_system(act, forced_row);
  const Eigen::MatrixXd pinv = reduced_pseudoinverse(sys);
  const Eigen::VectorXd rhs = (Eigen::VectorXd::Ones(n) - act.betas) * r;
  sol.mu = pinv * drop_entry(rhs, sys.removed_row);
  sol.market_return = act.weights.dot(sol.mu);
  // The removed equation is checked here too, not assumed.
  sol.capm_residual_norm = capm_residual(act, sol.mu).cwiseAbs().maxCoeff();
  sol.removed_row = sys.removed_row;
  sol.min_norm_certificate = act.betas.dot(sol.mu);
  return sol;
}

EquilibriumSolution solve_validated(const MarketParams& params,
                                    std::optional<Eigen::Index> forced_original_row) {
  const ActiveMarket act = eliminate_zero_weights(params);
  if (act.index.empty()) {
    throw Error(ErrorCode::NonFiniteInput, "all weights are zero");
  }

  std::optional<Eigen::Index> forced_active_row;
  if (forced_original_row) {
    auto it = std::find(act.index.begin(), act.index.end(), *forced_original_row);
    if (it == act.index.end()) {
      throw Error(ErrorCode::ConfigError,
                  "removed_row " + std::to_string(*forced_original_row) +
                      " is not a positively weighted asset");
    }
    forced_active_row = static_cast<Eigen::Index>(it - act.index.begin());
  }

  EquilibriumSolution inner = solve_active(act.params, forced_active_row);

  EquilibriumSolution sol;
  sol.mu = Eigen::VectorXd::Constant(params.n_assets(),
                                     std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index k = 0; k < inner.mu.size(); ++k) {
    sol.mu[act.index[k]] = inner.mu[k];
  }
  sol.market_return = inner.market_return;
  sol.capm_residual_norm = inner.capm_residual_norm;
  sol.removed_row = inner.removed_row >= 0 ? act.index[inner.removed_row] : -1;
  sol.min_norm_certificate = inner.min_norm_certificate;
  sol.dropped_assets = act.dropped;
  sol.degenerate_single_asset = inner.degenerate_single_asset;
  return sol;
}

}  // namespace

SystemMatrix build_system_matrix(const MarketParams& params) {
  return build_active_system(params, std::nullopt);
}

Eigen::MatrixXd reduced_pseudoinverse(const SystemMatrix& sys) {
  const Eigen::Index rows = sys.reduced.rows();
  const Eigen::Index cols = sys.reduced.cols();
  if (rows == 0) {
    return Eigen::MatrixXd(cols, 0);
  }
  const Eigen::MatrixXd gram = sys.reduced * sys.reduced.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd pinv = llt.solve(sys.reduced).transpose();
    const double right_inverse_err =
        (sys.reduced * pinv - Eigen::MatrixXd::Identity(rows, rows))
            .cwiseAbs()
            .maxCoeff();
    if (right_inverse_err <= 1e-10) {
      return pinv;
    }
  }
  return svd_pseudoinverse(sys.reduced, rows);
}

EquilibriumSolution solve_equilibrium(const MarketParams& params) {
  return solve_validated(validate_market(params), std::nullopt);
}

EquilibriumSolution solve_equilibrium_with_row(const MarketParams& params,
                                               Eigen::Index removed_row) {
  if (removed_row < 0 || removed_row >= params.n_assets()) {
    throw Error(ErrorCode::ConfigError,
                "removed_row " + std::to_string(removed_row) + " out of range");
  }
  return solve_validated(validate_market(params), removed_row);
}

Eigen::VectorXd solve_frozen_system(const MarketParams& params,
                                    Eigen::Index removed_row) {
  const Eigen::Index n = params.n_assets();
  if (removed_row < 0 || removed_row >= n) {
    throw Error(ErrorCode::ConfigError,
                "removed_row " + std::to_string(removed_row) + " out of range");
  }
  if (n < 2) {
    throw Error(ErrorCode::UndefinedForSingleAsset,
                "the frozen reduced system needs at least two assets");
  }
  const Eigen::MatrixXd d =
      Eigen::MatrixXd::Identity(n, n) - params.betas * params.weights.transpose();
  SystemMatrix sys;
  sys.d = d;
  sys.removed_row = removed_row;
  sys.reduced = drop_row(d, removed_row);
  sys.rank_estimate = n - 1;  // caller guarantees a well-posed base point
  Eigen::MatrixXd pinv;
  try {
    pinv = reduced_pseudoinverse(sys);
  } catch (const Error& e) {
    throw Error(ErrorCode::PerturbationInfeasible, e.what());
  }
  const Eigen::VectorXd rhs =
      (Eigen::VectorXd::Ones(n) - params.betas) * params.risk_free_rate;
  return pinv * drop_entry(rhs, removed_row);
}

SolutionFamily solution_family_oracle(const MarketParams& params) {
  const Eigen::Index n = params.n_assets();
  if (n < 2) {
    throw Error(ErrorCode::UndefinedForSingleAsset,
                "the solution family needs at least two assets");
  }
  const double beta_norm2 = params.betas.squaredNorm();
  if (!(beta_norm2 > 0.0) || !std::isfinite(beta_norm2)) {
    throw Error(ErrorCode::ZeroBetaVector,
                "betas have zero norm; impossible for a valid market unless degenerate");
  }
  SolutionFamily family;
  family.base_point =
      (Eigen::VectorXd::Ones(n) - params.betas) * params.risk_free_rate;
  family.direction = params.betas;
  family.min_norm_parameter =
      params.risk_free_rate * (1.0 - params.betas.sum() / beta_norm2);
  return family;
}

}  // namespace endocapm
