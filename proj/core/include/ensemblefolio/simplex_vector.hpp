#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>

#include "ensemblefolio/errors.hpp"

namespace ensemblefolio {

/// Tolerance on |sum - 1| accepted for simplex points.
inline constexpr double kSimplexSumTolerance = 1e-12;

/// A point of the probability simplex. The tag keeps asset portfolios and
/// combinations over component strategies from being mixed up.
template <typename Tag>
class SimplexVector {
 public:
  SimplexVector() = default;

  /// Validates non-negativity and unit sum (within tol); throws ConfigError otherwise.
  explicit SimplexVector(Eigen::VectorXd weights, double tol = kSimplexSumTolerance)
      : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw ConfigError("simplex vector must be non-empty");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
      const double w = weights_[i];
      if (!std::isfinite(w) || w < 0.0) {
        throw ConfigError("simplex weight " + std::to_string(i) + " is negative or not finite");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw ConfigError("simplex weights sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  /// Clamps tiny negative round-off to zero and rescales to unit sum. For
  /// weights produced by convex combinations of simplex points.
  static SimplexVector normalized(Eigen::VectorXd weights) {
    if (weights.size() == 0) throw ConfigError("simplex vector must be non-empty");
    weights = weights.cwiseMax(0.0);
    const double sum = weights.sum();
    if (!(sum > 0.0) || !std::isfinite(sum)) throw ConfigError("cannot normalize a zero or non-finite vector");
    weights /= sum;
    SimplexVector out;
    out.weights_ = std::move(weights);
    return out;
  }

  static SimplexVector uniform(std::size_t dim) {
    if (dim == 0) throw ConfigError("simplex dimension must be positive");
    SimplexVector out;
    out.weights_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), 1.0 / static_cast<double>(dim));
    return out;
  }

  static SimplexVector vertex(std::size_t dim, std::size_t j) {
    if (j >= dim) throw ConfigError("vertex index out of range");
    SimplexVector out;
    out.weights_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    out.weights_[static_cast<Eigen::Index>(j)] = 1.0;
    return out;
  }

  [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  [[nodiscard]] double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

  friend bool operator==(const SimplexVector& a, const SimplexVector& b) {
    return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
  }

 private:
  Eigen::VectorXd weights_;
};

struct AssetSpace;
struct ComponentSpace;

/// Allocation over assets, a point of B^m.
using Portfolio = SimplexVector<AssetSpace>;
/// Fixed mixing weights over component strategies, a point of B^k.
using ConstantCombination = SimplexVector<ComponentSpace>;

}  // namespace ensemblefolio
