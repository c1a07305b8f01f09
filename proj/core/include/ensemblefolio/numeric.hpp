#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ensemblefolio::numeric {

/// Pairwise (cascade) summation in index order. Result depends only on the
/// values and their order.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 32;
  if (xs.size() <= kBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// log(sum_i exp(xs[i])) with max subtraction. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(hi)) return hi;
  std::vector<double> shifted(xs.size());
  std::transform(xs.begin(), xs.end(), shifted.begin(), [hi](double x) { return std::exp(x - hi); });
  return hi + std::log(pairwise_sum(shifted));
}

/// Normalized weights proportional to exp(log_weights[i]).
inline std::vector<double> softmax(std::span<const double> log_weights) {
  std::vector<double> w(log_weights.size());
  if (w.empty()) return w;
  const double hi = *std::max_element(log_weights.begin(), log_weights.end());
  std::transform(log_weights.begin(), log_weights.end(), w.begin(), [hi](double x) { return std::exp(x - hi); });
  const double total = pairwise_sum(w);
  for (double& x : w) x /= total;
  return w;
}

}  // namespace ensemblefolio::numeric
