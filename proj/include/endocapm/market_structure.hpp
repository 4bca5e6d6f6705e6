#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "endocapm/market.hpp"

namespace endocapm {

/// Power-law weight family w_i proportional to i^(-gamma), i = 1..N.
/// gamma = 0 is the uniform market; gamma = +inf is the degenerate
/// single-asset limit (all weight on asset 1).
struct WeightLaw {
  double gamma = 0.0;
  int n_assets = 0;
};

Eigen::VectorXd power_law_weights(const WeightLaw& law);

/// Normalized Herfindahl-Hirschman index (w.w - 1/N) / (1 - 1/N), computed
/// in the cancellation-free centered form. 0 for equal weights, 1 when a
/// single asset carries the whole market. Undefined for N = 1.
double normalized_hhi(const Eigen::VectorXd& weights);

/// Moves beta along the weight direction until w.beta = 1 while keeping
/// every entry inside bounds. The box intersected with the constraint must
/// be non-empty (lo <= 1 <= hi).
Eigen::VectorXd project_onto_constraint(const Eigen::VectorXd& beta,
                                        const Eigen::VectorXd& weights,
                                        Interval bounds);

/// Uniform draw in the box, projected onto w.beta = 1. Deterministic for a
/// fixed seed. Throws InfeasibleBounds when no beta in the box satisfies
/// the constraint.
Eigen::VectorXd sample_constrained_beta(const Eigen::VectorXd& weights,
                                        Interval bounds, std::uint64_t seed);

}  // namespace endocapm
