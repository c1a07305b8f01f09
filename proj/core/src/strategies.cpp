#include "ensemblefolio/strategies.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <numeric>
#include <vector>

#include "ensemblefolio/csv.hpp"
#include "ensemblefolio/errors.hpp"

namespace ensemblefolio {
namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;
constexpr double kStepEpsilon = 1e-12;
constexpr double kSupportThreshold = 1e-12;

void check_window(const ReturnSeries& r, std::size_t n, std::size_t window, std::size_t min_window) {
  if (window < min_window) {
    throw InsufficientDataError("window " + std::to_string(window) + " is below the minimum of " +
                                std::to_string(min_window));
  }
  if (n <= window) {
    throw InsufficientDataError("period " + std::to_string(n) + " has fewer than " + std::to_string(window) +
                                " prior return rows");
  }
  if (n > r.periods() + 1) {
    throw InsufficientDataError("period " + std::to_string(n) + " is beyond the return series");
  }
}

// Minimization form g(b) = <b, cov b> - alpha <b, mean>.
double loss(const RollingEstimates& est, const Eigen::VectorXd& b, double alpha) {
  return b.dot(est.cov * b) - alpha * b.dot(est.mean);
}

// Exact minimizer of g on the affine hull of the given support, if it exists
// and stays inside the simplex.
std::optional<Eigen::VectorXd> solve_on_face(const RollingEstimates& est, double alpha,
                                             const std::vector<Eigen::Index>& support, Eigen::Index m) {
  const auto s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs(s + 1);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = 2.0 * est.cov(support[a], support[b]);
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
    rhs[a] = alpha * est.mean[support[a]];
  }
  rhs[s] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd sol = lu.solve(rhs);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (Eigen::Index a = 0; a < s; ++a) {
    if (!std::isfinite(sol[a]) || sol[a] < -1e-13) return std::nullopt;
    b[support[a]] = std::max(0.0, sol[a]);
  }
  const double sum = b.sum();
  if (!(sum > 0.0)) return std::nullopt;
  return b / sum;
}

}  // namespace

void MVConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("risk aversion must be finite and >= 0");
  if (window < 2) throw ConfigError("rolling window must be at least 2");
  if (!(solver_tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iterations == 0) throw ConfigError("solver needs at least one iteration");
}

Eigen::VectorXd rolling_mean(const ReturnSeries& r, std::size_t n, std::size_t window) {
  check_window(r, n, window, 1);
  const auto first = static_cast<Eigen::Index>(n - window - 1);
  const auto len = static_cast<Eigen::Index>(window);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(r.returns.cols());
  for (Eigen::Index h = first; h < first + len; ++h) sum += r.returns.row(h).transpose();
  return sum / static_cast<double>(window);
}

Eigen::MatrixXd rolling_cov(const ReturnSeries& r, std::size_t n, std::size_t window) {
  check_window(r, n, window, 2);
  const auto first = static_cast<Eigen::Index>(n - window - 1);
  const auto len = static_cast<Eigen::Index>(window);
  const Eigen::Index m = r.returns.cols();
  // Welford co-moment accumulation.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd comoment = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index h = 0; h < len; ++h) {
    const Eigen::VectorXd x = r.returns.row(first + h).transpose();
    const Eigen::VectorXd before = x - mean;
    mean += before / static_cast<double>(h + 1);
    const Eigen::VectorXd after = x - mean;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) comoment(i, j) += before[i] * after[j];
    }
  }
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      cov(i, j) = comoment(i, j) / static_cast<double>(len - 1);
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

RollingEstimates rolling_estimates(const ReturnSeries& r, std::size_t n, std::size_t window) {
  return RollingEstimates{rolling_mean(r, n, window), rolling_cov(r, n, window), window};
}

void validate(const RollingEstimates& est) {
  const Eigen::Index m = est.mean.size();
  if (m == 0) throw ConfigError("estimates are empty");
  if (est.cov.rows() != m || est.cov.cols() != m) throw ConfigError("covariance shape does not match mean");
  if (!est.mean.allFinite() || !est.cov.allFinite()) throw EstimatorError("estimates contain non-finite values");
  const double scale = std::max(1.0, est.cov.cwiseAbs().maxCoeff());
  if ((est.cov - est.cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw EstimatorError("covariance estimate is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw EstimatorError("covariance estimate has eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()));
  }
}

double mv_objective(const RollingEstimates& est, const Eigen::VectorXd& b, double alpha) {
  return -loss(est, b, alpha);
}

MVSolution mv_solve(const RollingEstimates& est, double alpha, double tol, std::size_t max_iterations) {
  validate(est);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("risk aversion must be finite and >= 0");
  const Eigen::Index m = est.mean.size();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est.cov, Eigen::EigenvaluesOnly);
  const double lambda_max = std::max(0.0, eig.eigenvalues().maxCoeff());

  // Constant objective: every portfolio is optimal, pick the centre of the face.
  if (alpha == 0.0 && lambda_max == 0.0) {
    const Portfolio b = Portfolio::uniform(static_cast<std::size_t>(m));
    return MVSolution{b, mv_objective(est, b.weights(), alpha), 0, false};
  }

  const double step = 1.0 / (2.0 * lambda_max + kStepEpsilon);
  auto gradient = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd { return 2.0 * (est.cov * b) - alpha * est.mean; };

  Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd y = x;
  double fx = loss(est, x, alpha);
  double t = 1.0;
  std::size_t it = 0;
  while (it < max_iterations) {
    ++it;
    const Eigen::VectorXd x_new = project_simplex(y - step * gradient(y)).weights();
    const double f_new = loss(est, x_new, alpha);
    if (f_new > fx) {
      // Momentum overshoot: restart from the last accepted iterate.
      t = 1.0;
      y = x;
      continue;
    }
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_new + ((t - 1.0) / t_new) * (x_new - x);
    const double improvement = fx - f_new;
    x = x_new;
    fx = f_new;
    t = t_new;
    if (improvement < tol) break;
  }

  // The iterate identifies the active face up to slowly vanishing weights;
  // try a few support thresholds and keep any exact face solution that is no worse.
  bool polished = false;
  for (const double threshold : {kSupportThreshold, 1e-8, 1e-5}) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (x[j] > threshold) support.push_back(j);
    }
    if (support.empty()) continue;
    if (auto face = solve_on_face(est, alpha, support, m)) {
      const double f_face = loss(est, *face, alpha);
      if (f_face <= fx) {
        polished = polished || f_face < fx || *face != x;
        x = *face;
        fx = f_face;
      }
    }
  }
  return MVSolution{Portfolio::normalized(x), -fx, it, polished};
}

Portfolio mv_portfolio(const RollingEstimates& est, double alpha, double tol) {
  return mv_solve(est, alpha, tol).portfolio;
}

Portfolio mv_grid_oracle(const RollingEstimates& est, double alpha, const SimplexGrid& grid) {
  if (grid.dim() != static_cast<std::size_t>(est.mean.size())) {
    throw ConfigError("grid dimension " + std::to_string(grid.dim()) + " does not match " +
                      std::to_string(est.mean.size()) + " assets");
  }
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd b(est.mean.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) b[static_cast<Eigen::Index>(j)] = p[j];
    const double v = mv_objective(est, b, alpha);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const auto p = grid.point(best);
  for (std::size_t j = 0; j < p.size(); ++j) b[static_cast<Eigen::Index>(j)] = p[j];
  return Portfolio(b);
}

Portfolio project_simplex(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw ConfigError("cannot project an empty vector");
  if (!v.allFinite()) throw ConfigError("cannot project a non-finite vector");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>{});
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return Portfolio::normalized((v.array() - theta).cwiseMax(0.0).matrix());
}

double portfolio_return(const Portfolio& b, const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(b.size())) {
    throw ConfigError("portfolio has " + std::to_string(b.size()) + " weights but return row has " +
                      std::to_string(x.size()) + " entries");
  }
  return b.weights().dot(x);
}

MeanVarianceStrategy::MeanVarianceStrategy(MVConfig config) : config_(config) { config_.validate(); }

std::string MeanVarianceStrategy::name() const { return mv_strategy_name(config_.alpha); }

Portfolio MeanVarianceStrategy::portfolio(const ReturnSeries& r, std::size_t n) const {
  const RollingEstimates est = rolling_estimates(r, n, config_.window);
  return mv_solve(est, config_.alpha, config_.solver_tol, config_.max_iterations).portfolio;
}

Portfolio ConstantStrategy::portfolio(const ReturnSeries& r, std::size_t) const {
  if (r.assets() != b_.size()) throw ConfigError("constant strategy dimension does not match the market");
  return b_;
}

std::string mv_strategy_name(double alpha) { return "mv_" + csv::format_double(alpha); }

}  // namespace ensemblefolio
