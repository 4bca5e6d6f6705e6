#include <doctest.h>

#include <cmath>
#include <random>

#include "endocapm/equilibrium.hpp"
#include "endocapm/sensitivity.hpp"
#include "test_support.hpp"

using namespace endocapm;
using test::make_params;

TEST_CASE("standard jacobian values") {
  const MarketParams two = make_params({0.5, 0.5}, {0.5, 1.5}, 0.02);
  const Eigen::MatrixXd jac = standard_jacobian(two, 0.004);
  CHECK(jac(0, 0) == doctest::Approx(-0.016).epsilon(1e-14));
  CHECK(jac(1, 1) == doctest::Approx(-0.016).epsilon(1e-14));
  CHECK(jac(0, 1) == 0.0);
  CHECK(jac(1, 0) == 0.0);

  CHECK(standard_jacobian(two, two.risk_free_rate).cwiseAbs().maxCoeff() == 0.0);

  const MarketParams one = make_params({1.0}, {1.0}, 0.02);
  const Eigen::MatrixXd scalar = standard_jacobian(one, 0.1);
  REQUIRE(scalar.rows() == 1);
  CHECK(scalar(0, 0) == doctest::Approx(0.08).epsilon(1e-14));
}

TEST_CASE("two-asset endogenous jacobian has real off-diagonal mass") {
  const MarketParams params = make_params({0.5, 0.5}, {0.5, 1.5}, 0.02);
  const Eigen::MatrixXd jac = endogenous_jacobian(params);
  double off = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (i != j) off = std::max(off, std::abs(jac(i, j)));
  CHECK(off > 1e-3);
  // hand-evaluated with removed_row = 0
  CHECK(jac(0, 1) == doctest::Approx(0.0224).epsilon(1e-10));
  CHECK(jac(1, 1) == doctest::Approx(0.0032).epsilon(1e-10));
  CHECK(jac(0, 0) == 0.0);
  CHECK(jac(1, 0) == 0.0);
}

TEST_CASE("endogenous jacobian matches frozen-system finite differences") {
  std::mt19937_64 engine(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(engine() % 9);
    const MarketParams params = test::random_market(engine, n);
    const Eigen::MatrixXd jac = endogenous_jacobian(params);
    const Eigen::MatrixXd fd = fd_jacobian_oracle(params, 1e-6, FdMode::FrozenSystem);
    CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("projected finite differences equal the jacobian applied to tangent directions") {
  std::mt19937_64 engine(29);
  const MarketParams params = test::random_market(engine, 5);
  const Eigen::MatrixXd jac = endogenous_jacobian(params);
  const Eigen::MatrixXd fd = fd_jacobian_oracle(params, 1e-6, FdMode::Projected);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const Eigen::VectorXd tangent =
        Eigen::VectorXd::Unit(5, j) - params.weights[j] * params.betas;
    CHECK((fd.col(j) - jac * tangent).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("finite differences of an affine map") {
  const MarketParams params = make_params({0.5, 0.5}, {0.5, 1.5}, 0.02);
  const double r = params.risk_free_rate;
  auto affine = [&](const Eigen::VectorXd& beta) {
    return ((Eigen::VectorXd::Ones(2) - beta) * r).eval();
  };
  const Eigen::MatrixXd raw =
      fd_jacobian_of_map(affine, params.betas, params.weights, 1e-6, FdMode::FrozenSystem);
  CHECK((raw + r * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);

  // along tangents the derivative picks up the constraint projector
  const Eigen::MatrixXd projected =
      fd_jacobian_of_map(affine, params.betas, params.weights, 1e-6, FdMode::Projected);
  const Eigen::MatrixXd expected =
      -r * (Eigen::MatrixXd::Identity(2, 2) -
            params.betas * params.weights.transpose());
  CHECK((projected - expected).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("central differences converge at second order") {
  const MarketParams params =
      make_params({0.4, 0.3, 0.2, 0.1}, {0.8 / 1.02, 1.1 / 1.02, 1.3 / 1.02, 1.1 / 1.02},
                  0.02);
  const MarketParams valid = validate_market(params);
  const Eigen::MatrixXd jac = endogenous_jacobian(valid);
  double previous = -1.0;
  for (double step : {1e-2, 5e-3, 2.5e-3}) {
    const Eigen::MatrixXd fd = fd_jacobian_oracle(valid, step, FdMode::FrozenSystem);
    const double deviation = (jac - fd).cwiseAbs().maxCoeff();
    if (previous > 0.0) {
      const double ratio = previous / deviation;
      CHECK(ratio > 3.0);
      CHECK(ratio < 5.0);
    }
    previous = deviation;
  }
}

TEST_CASE("step must be positive") {
  const MarketParams params = make_params({0.5, 0.5}, {0.5, 1.5}, 0.02);
  CHECK_THROWS_AS(fd_jacobian_oracle(params, 0.0, FdMode::FrozenSystem), Error);
}

TEST_CASE("the system matrix approaches the identity for atomistic markets") {
  std::mt19937_64 engine(31);
  for (const int n : {10, 100, 1000}) {
    MarketParams params;
    params.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    params.betas = sample_constrained_beta(params.weights, {-3.0, 3.0}, engine());
    params.risk_free_rate = 0.02;
    const Eigen::MatrixXd d =
        Eigen::MatrixXd::Identity(n, n) - params.betas * params.weights.transpose();
    const double measured = (d - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    const double bound = params.betas.cwiseAbs().maxCoeff() / n;
    CHECK(measured <= bound + 1e-15);
    CHECK(bound <= 3.0 / n + 1e-15);
  }
}

TEST_CASE("off-diagonal influence fades in the atomistic proxy") {
  std::mt19937_64 engine(37);
  double previous = std::numeric_limits<double>::infinity();
  for (const int n : {10, 100, 1000}) {
    MarketParams params;
    params.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    params.betas = sample_constrained_beta(params.weights, {-3.0, 3.0}, engine());
    params.risk_free_rate = 0.02;
    const Eigen::MatrixXd jac = endogenous_jacobian(params);
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) off = std::max(off, std::abs(jac(i, j)));
      }
    }
    // decays at the weight scale max|beta| / N (modest constant factor)
    CHECK(off <= 10.0 * params.betas.cwiseAbs().maxCoeff() / n);
    CHECK(off < previous);
    previous = off;
  }
}

TEST_CASE("market return gradient agrees with the jacobian on tangent directions") {
  std::mt19937_64 engine(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(engine() % 7);
    const MarketParams params = test::random_market(engine, n);
    const Eigen::VectorXd from_jacobian =
        endogenous_jacobian(params).transpose() * params.weights;
    const Eigen::VectorXd closed_form = market_return_gradient(params);
    const auto tangential = [&](const Eigen::VectorXd& v) {
      return (v - params.weights * (params.weights.dot(v) / params.weights.squaredNorm()))
          .eval();
    };
    CHECK((tangential(from_jacobian) - tangential(closed_form)).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("sensitivity report composition") {
  const MarketParams params = make_params({0.5, 0.5}, {0.5, 1.5}, 0.02);
  const SensitivityReport report = sensitivity_report(params);
  CHECK(report.step == kDefaultFdStep);
  CHECK(report.max_abs_deviation <= 1e-8);
  CHECK(report.off_diagonal_mass > 1e-3);
  CHECK(report.removed_row == 0);
  // the standard jacobian stays diagonal with equal entries
  CHECK(report.standard_jacobian(0, 1) == 0.0);
  CHECK(report.standard_jacobian(1, 0) == 0.0);
  CHECK(report.standard_jacobian(0, 0) == report.standard_jacobian(1, 1));
}
