#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <string>

#include "ensemblefolio/market_data.hpp"
#include "ensemblefolio/simplex_grid.hpp"
#include "ensemblefolio/simplex_vector.hpp"

namespace ensemblefolio {

/// Sample moments of the J gross-return rows preceding a period.
struct RollingEstimates {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t window = 0;
};

/// Parameters of one Mean-Variance component strategy.
struct MVConfig {
  double alpha = 0.0;            // risk aversion
  std::size_t window = 20;       // J
  double solver_tol = 1e-10;     // objective improvement threshold
  std::size_t max_iterations = 10'000;

  void validate() const;
};

// Period indices below are 1-based as in the model: period n trades on
// return row n (0-based n-1) and may only use rows n-J .. n-1 (1-based).

/// Componentwise mean of the J rows before period n. Needs J < n <= T + 1.
Eigen::VectorXd rolling_mean(const ReturnSeries& r, std::size_t n, std::size_t window);

/// Unbiased (divisor J-1) sample covariance over the same window.
Eigen::MatrixXd rolling_cov(const ReturnSeries& r, std::size_t n, std::size_t window);

RollingEstimates rolling_estimates(const ReturnSeries& r, std::size_t n, std::size_t window);

/// Throws EstimatorError unless cov is square, symmetric within 1e-12 and
/// has no eigenvalue below -1e-10; ConfigError on dimension mismatch.
void validate(const RollingEstimates& est);

/// alpha * <b, mean> - <b, cov b>.
double mv_objective(const RollingEstimates& est, const Eigen::VectorXd& b, double alpha);

struct MVSolution {
  Portfolio portfolio;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool polished = false;  // an exact KKT solve on the active face improved the iterate
};

/// Maximizes the M-V objective over the simplex with restarted accelerated
/// projected gradient (step 1/(2 lambda_max + 1e-12)), then polishes on the
/// detected active face. Deterministic for fixed inputs.
MVSolution mv_solve(const RollingEstimates& est, double alpha, double tol = 1e-10,
                    std::size_t max_iterations = 10'000);

Portfolio mv_portfolio(const RollingEstimates& est, double alpha, double tol = 1e-10);

/// Best grid point for the M-V objective; ties go to the lowest grid index.
Portfolio mv_grid_oracle(const RollingEstimates& est, double alpha, const SimplexGrid& grid);

/// Euclidean projection onto the simplex (sort-and-threshold).
Portfolio project_simplex(const Eigen::VectorXd& v);

/// <b, x>, the gross return of portfolio b on return row x.
double portfolio_return(const Portfolio& b, const Eigen::VectorXd& x);

/// A component strategy: emits a portfolio for each tradable period.
class ComponentStrategy {
 public:
  virtual ~ComponentStrategy() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  /// Earliest 1-based period this strategy can trade.
  [[nodiscard]] virtual std::size_t first_period() const = 0;
  [[nodiscard]] virtual Portfolio portfolio(const ReturnSeries& r, std::size_t n) const = 0;
};

class MeanVarianceStrategy final : public ComponentStrategy {
 public:
  explicit MeanVarianceStrategy(MVConfig config);
  [[nodiscard]] std::string name() const override;
  [[nodiscard]] std::size_t first_period() const override { return config_.window + 1; }
  [[nodiscard]] Portfolio portfolio(const ReturnSeries& r, std::size_t n) const override;
  [[nodiscard]] const MVConfig& config() const noexcept { return config_; }

 private:
  MVConfig config_;
};

/// Holds the same portfolio every period (rebalanced).
class ConstantStrategy final : public ComponentStrategy {
 public:
  ConstantStrategy(std::string name, Portfolio b) : name_(std::move(name)), b_(std::move(b)) {}
  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] std::size_t first_period() const override { return 1; }
  [[nodiscard]] Portfolio portfolio(const ReturnSeries& r, std::size_t n) const override;

 private:
  std::string name_;
  Portfolio b_;
};

/// Name used for an M-V component in output files, e.g. "mv_0.005".
std::string mv_strategy_name(double alpha);

}  // namespace ensemblefolio
