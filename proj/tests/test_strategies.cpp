#include <gtest/gtest.h>

#include <random>

#include "ensemblefolio/errors.hpp"
#include "ensemblefolio/simplex_grid.hpp"
#include "ensemblefolio/strategies.hpp"
#include "support.hpp"

namespace ef = ensemblefolio;

namespace {

ef::ReturnSeries series(const Eigen::MatrixXd& x) {
  ef::ReturnSeries r;
  r.returns = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) r.symbols.push_back("S" + std::to_string(j));
  for (Eigen::Index t = 0; t < x.rows(); ++t) r.dates.push_back(std::to_string(t));
  return r;
}

// Two-pass covariance of rows [first, first + len).
Eigen::MatrixXd two_pass_cov(const Eigen::MatrixXd& x, Eigen::Index first, Eigen::Index len) {
  const Eigen::MatrixXd block = x.middleRows(first, len);
  const Eigen::RowVectorXd mean = block.colwise().mean();
  const Eigen::MatrixXd centered = block.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(len - 1);
}

// Simplex projection by bisection on the threshold theta.
Eigen::VectorXd bisection_projection(const Eigen::VectorXd& v) {
  double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((v.array() - mid).max(0.0).sum() > 1.0 ? lo : hi) = mid;
  }
  return (v.array() - 0.5 * (lo + hi)).max(0.0);
}

ef::RollingEstimates random_estimates(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> mu(0.95, 1.05), a(-1.0, 1.0);
  ef::RollingEstimates est;
  est.window = 20;
  est.mean.resize(static_cast<Eigen::Index>(m));
  for (auto& v : est.mean) v = mu(rng);
  Eigen::MatrixXd f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (auto& v : f.reshaped()) v = a(rng);
  est.cov = f * f.transpose() * 1e-3;
  return est;
}

}  // namespace

TEST(Rolling, MatchesTwoPassOracle) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x = testsupport::random_returns(rng, 60, 4);
  const auto r = series(x);
  for (std::size_t n : {21u, 30u, 61u}) {
    const auto mean = ef::rolling_mean(r, n, 20);
    const auto cov = ef::rolling_cov(r, n, 20);
    const auto first = static_cast<Eigen::Index>(n - 21);
    EXPECT_LT((mean.transpose() - x.middleRows(first, 20).colwise().mean()).norm(), 1e-14);
    EXPECT_LT((cov - two_pass_cov(x, first, 20)).norm(), 1e-14);
  }
}

TEST(Rolling, WindowBoundsAreEnforced) {
  std::mt19937_64 rng(1);
  const auto r = series(testsupport::random_returns(rng, 30, 3));
  EXPECT_THROW(ef::rolling_mean(r, 20, 20), ef::InsufficientDataError);
  EXPECT_THROW(ef::rolling_cov(r, 32, 20), ef::InsufficientDataError);
  EXPECT_NO_THROW(ef::rolling_cov(r, 31, 20));
}

TEST(Rolling, NoLookahead) {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd x = testsupport::random_returns(rng, 50, 3);
  const ef::MeanVarianceStrategy s(ef::MVConfig{0.5, 20});
  const auto before = s.portfolio(series(x), 30);
  x.bottomRows(21).setConstant(7.0);  // rows of periods 30 and later
  EXPECT_EQ(s.portfolio(series(x), 30), before);
}

TEST(Estimates, ValidationCatchesBadCovariance) {
  ef::RollingEstimates est{Eigen::Vector2d(1.0, 1.0), Eigen::Matrix2d::Identity(), 20};
  EXPECT_NO_THROW(ef::validate(est));
  est.cov(0, 1) = 0.5;
  EXPECT_THROW(ef::validate(est), ef::EstimatorError);
  est.cov << 1.0, 2.0, 2.0, 1.0;  // eigenvalue -1
  EXPECT_THROW(ef::validate(est), ef::EstimatorError);
  est.cov = Eigen::Matrix3d::Identity();
  EXPECT_THROW(ef::validate(est), ef::ConfigError);
}

TEST(Projection, AgreesWithBisection) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(1 + trial % 7);
    for (auto& e : v) e = g(rng);
    const auto p = ef::project_simplex(v);
    EXPECT_LT((p.weights() - bisection_projection(v)).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW(ef::project_simplex(Eigen::VectorXd()), ef::ConfigError);
  EXPECT_THROW(ef::project_simplex(Eigen::Vector2d(1.0, std::nan(""))), ef::ConfigError);
}

TEST(Projection, PointsOnTheSimplexAreFixed) {
  const Eigen::Vector3d v(0.2, 0.3, 0.5);
  EXPECT_LT((ef::project_simplex(v).weights() - v).norm(), 1e-15);
}

TEST(MeanVariance, HandDerivedInstance) {
  // max 4 <b, (1.1, 1.0)> - |b|^2 on the segment: 4(0.1 b1 + 1) - b1^2 - (1 - b1)^2 peaks at b1 = 0.6.
  const ef::RollingEstimates est{Eigen::Vector2d(1.1, 1.0), Eigen::Matrix2d::Identity(), 20};
  const auto sol = ef::mv_solve(est, 4.0);
  EXPECT_NEAR(sol.portfolio[0], 0.6, 1e-9);
  EXPECT_NEAR(sol.portfolio[1], 0.4, 1e-9);
  EXPECT_NEAR(sol.objective, ef::mv_objective(est, sol.portfolio.weights(), 4.0), 1e-15);
}

TEST(MeanVariance, CornerSolutionForLargeAlpha) {
  const ef::RollingEstimates est{Eigen::Vector3d(1.2, 1.0, 0.9), Eigen::Matrix3d::Identity() * 1e-4, 20};
  const auto b = ef::mv_portfolio(est, 100.0);
  EXPECT_NEAR(b[0], 1.0, 1e-12);
}

TEST(MeanVariance, ZeroAlphaZeroCovarianceIsUniform) {
  const ef::RollingEstimates est{Eigen::Vector3d(1.0, 1.0, 1.0), Eigen::Matrix3d::Zero(), 20};
  const auto b = ef::mv_portfolio(est, 0.0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(b[j], 1.0 / 3.0);
}

TEST(MeanVariance, NeverWorseThanGridOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> alpha(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + trial % 3;
    const auto est = random_estimates(rng, m);
    const double a = alpha(rng);
    const auto grid = ef::SimplexGrid::enumerate(m, m == 4 ? 60 : 200);
    const auto oracle = ef::mv_grid_oracle(est, a, grid);
    const auto sol = ef::mv_solve(est, a);
    EXPECT_GE(sol.objective, ef::mv_objective(est, oracle.weights(), a) - 1e-12);
  }
}

TEST(MeanVariance, KktConditionsHold) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + trial % 5;
    const auto est = random_estimates(rng, m);
    const double a = 0.05 * trial;
    const auto b = ef::mv_solve(est, a).portfolio.weights();
    // Gradient of the maximized objective; on the support it equals the multiplier, elsewhere it is below.
    const Eigen::VectorXd grad = a * est.mean - 2.0 * est.cov * b;
    double nu = -1e300;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (b[j] > 1e-9) nu = std::max(nu, grad[j]);
    }
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      if (b[j] > 1e-9) EXPECT_NEAR(grad[j], nu, 1e-7);
      else EXPECT_LE(grad[j], nu + 1e-7);
    }
  }
}

TEST(MeanVariance, ConfigValidation) {
  EXPECT_THROW((ef::MVConfig{-1.0, 20}.validate()), ef::ConfigError);
  EXPECT_THROW((ef::MVConfig{1.0, 1}.validate()), ef::ConfigError);
  EXPECT_EQ(ef::mv_strategy_name(0.005), "mv_0.005");
  EXPECT_EQ(ef::mv_strategy_name(1.0), "mv_1");
}

TEST(MeanVariance, GridOracleRejectsWrongDimension) {
  const ef::RollingEstimates est{Eigen::Vector2d(1.1, 1.0), Eigen::Matrix2d::Identity(), 20};
  EXPECT_THROW(ef::mv_grid_oracle(est, 1.0, ef::SimplexGrid::enumerate(3, 4)), ef::ConfigError);
}

TEST(Constant, HoldsItsPortfolio) {
  std::mt19937_64 rng(8);
  const auto r = series(testsupport::random_returns(rng, 10, 3));
  const ef::ConstantStrategy s("hold", ef::Portfolio::vertex(3, 2));
  EXPECT_EQ(s.portfolio(r, 1), ef::Portfolio::vertex(3, 2));
  EXPECT_DOUBLE_EQ(ef::portfolio_return(s.portfolio(r, 4), r.returns.row(3).transpose()), r.returns(3, 2));
}
