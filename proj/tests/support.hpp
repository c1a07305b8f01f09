#pragma once

// Shared helpers for the unit and acceptance tests: random instances and
// brute-force oracles that do not go through the library's fast paths.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ensemblefolio/simplex_grid.hpp"
#include "ensemblefolio/simplex_vector.hpp"

namespace testsupport {

using ensemblefolio::Portfolio;
using ensemblefolio::SimplexGrid;

inline Eigen::VectorXd random_row(std::mt19937_64& rng, std::size_t m, double lo = 0.9, double hi = 1.1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd x(static_cast<Eigen::Index>(m));
  for (auto& v : x) v = u(rng);
  return x;
}

inline Eigen::MatrixXd random_returns(std::mt19937_64& rng, std::size_t periods, std::size_t m, double lo = 0.9,
                                      double hi = 1.1) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < periods; ++t) out.row(static_cast<Eigen::Index>(t)) = random_row(rng, m, lo, hi).transpose();
  return out;
}

// Flat Dirichlet draw, occasionally with exact zeros.
inline Portfolio random_portfolio(std::mt19937_64& rng, std::size_t m) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution drop(0.15);
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  for (auto& v : w) v = drop(rng) ? 0.0 : e(rng);
  if (w.sum() == 0.0) w[0] = 1.0;
  return Portfolio::normalized(w);
}

// Component portfolios for every period: comps[t][a].
inline std::vector<std::vector<Portfolio>> random_components(std::mt19937_64& rng, std::size_t periods, std::size_t k,
                                                             std::size_t m) {
  std::vector<std::vector<Portfolio>> out(periods);
  for (auto& row : out) {
    for (std::size_t a = 0; a < k; ++a) row.push_back(random_portfolio(rng, m));
  }
  return out;
}

// Wealth of every constant combination on the grid, as long double products.
// wealth[t][i] is S_{t+1}(b^lambda_i).
class GridWealthOracle {
 public:
  explicit GridWealthOracle(const SimplexGrid& grid) : grid_(grid), wealth_(grid.size(), 1.0L) {}

  void step(const std::vector<Portfolio>& comps, const Eigen::VectorXd& x) {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      long double r = 0.0L;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        long double bj = 0.0L;
        for (std::size_t a = 0; a < comps.size(); ++a) {
          bj += static_cast<long double>(grid_.composition(i)[a]) * comps[a][static_cast<std::size_t>(j)];
        }
        r += bj / grid_.denominator() * x[j];
      }
      wealth_[i] *= r;
    }
  }

  long double mean() const {
    long double s = 0.0L;
    for (auto w : wealth_) s += w;
    return s / static_cast<long double>(wealth_.size());
  }

  long double max() const { return *std::max_element(wealth_.begin(), wealth_.end()); }
  const std::vector<long double>& wealth() const { return wealth_; }

 private:
  const SimplexGrid& grid_;
  std::vector<long double> wealth_;
};

}  // namespace testsupport
