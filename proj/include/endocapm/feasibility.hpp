#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "endocapm/market.hpp"
#include "endocapm/market_structure.hpp"

namespace endocapm {

/// Supported range of market returns for one weight vector, in units of r.
struct RangeResult {
  double mu_max_over_r = 0.0;
  double mu_min_over_r = 0.0;
  Eigen::VectorXd argmax_beta;
  Eigen::VectorXd argmin_beta;
  int n_starts = 0;
  bool converged_max = false;
  bool converged_min = false;
  Interval beta_bounds;
};

struct WeightLawGrid {
  std::vector<double> gammas;
  std::vector<int> n_assets;

  /// gamma 0.0 .. 3.0 in steps of 0.1 plus the single-asset anchor at
  /// gamma = +inf (HHI exactly 1), crossed with N in {10, 50, 100, 500}.
  static WeightLawGrid default_grid();
};

/// One row of the concentration sweep dataset.
struct SweepRecord {
  double gamma = 0.0;
  int n_assets = 0;
  double hhi = 0.0;
  double mu_max_over_r = 0.0;
  double mu_min_over_r = 0.0;
  int n_starts = 0;
  bool converged_max = false;
  bool converged_min = false;
  std::uint64_t seed = 0;
  std::string error;  // empty on success; failed points keep NaN values
};

/// Multistart projected-gradient search for the extremes of
/// mu_M(beta) / r over w.beta = 1 inside the box. Start 0 is beta = 1
/// (whose market return is zero); the rest are seeded box samples, so
/// enlarging n_starts under the same seed only extends the start list.
/// The reported extrema are re-solved through the equilibrium path at the
/// stored argmax/argmin.
RangeResult optimize_return_range(const Eigen::VectorXd& weights, double r,
                                  Interval bounds, int n_starts,
                                  std::uint64_t seed);

/// One RangeResult per (gamma, N) grid point, flattened and sorted by
/// (N, hhi, gamma). Point k uses seed + k, so every record is
/// independently reproducible. threads = 0 picks the hardware count;
/// results do not depend on the execution order.
std::vector<SweepRecord> sweep_concentration(const WeightLawGrid& grid,
                                             double r, Interval bounds,
                                             int n_starts, std::uint64_t seed,
                                             int threads = 0);

struct HomogeneousCase {
  int n_assets = 0;
  double max_abs_mu = 0.0;
  double market_return = 0.0;
  bool pass = false;
};

struct SingleAssetCase {
  int n_assets = 0;
  double mu_m_over_r = 0.0;
  bool documented_limit = false;
  bool pass = false;
};

struct EqualWeightCase {
  int n_assets = 0;
  std::uint64_t seed = 0;
  double computed_mu_m_over_r = 0.0;
  double family_mu_m_over_r = 0.0;
  double claimed_mu_m_over_r = 0.0;
  std::string status;  // "agreement" or "disagreement" with the claimed 0
  std::string note;
};

struct AtomisticBoundCase {
  int n_assets = 0;
  double beta_cap = 0.0;
  double bound = 0.0;
  double measured = 0.0;
  bool pass = false;
};

/// Tabulated limiting behavior: homogeneous betas, a single dominant
/// asset, the equal-weight large-N market versus its claimed zero return,
/// the entrywise D -> I bound, and a commentary string on observed index
/// concentrations.
struct LimitReport {
  double risk_free_rate = 0.0;
  int n_large = 0;
  std::vector<HomogeneousCase> homogeneous;
  SingleAssetCase single_dominant;
  EqualWeightCase equal_weight;
  AtomisticBoundCase atomistic;
  std::string commentary;
};

LimitReport limiting_case_report(double r, int n_large, Interval beta_bounds,
                                 std::uint64_t seed);

}  // namespace endocapm
