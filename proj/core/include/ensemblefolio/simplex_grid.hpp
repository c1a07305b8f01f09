#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ensemblefolio/simplex_vector.hpp"

namespace ensemblefolio {

/// Default cap on grid points materialized by SimplexGrid::enumerate.
inline constexpr std::uint64_t kDefaultGridCap = 20'000'000;

/// C(D + k - 1, k - 1): number of compositions of D into k non-negative parts.
/// Throws CapacityError if the count overflows 64 bits; ConfigError if k or D is 0.
std::uint64_t grid_point_count(std::size_t k, std::uint64_t step_den);

/// Approximate resident bytes for a grid of `count` points in dimension k,
/// including one wealth-ledger slot and one scratch slot per point.
std::uint64_t grid_memory_bytes(std::size_t k, std::uint64_t count);

/// Finite discretization of B^k with step 1/D. Points are stored as integer
/// compositions of D and as doubles; order is descending lexicographic in the
/// compositions, so (D,0,...,0) comes first. Every vertex is on the grid.
class SimplexGrid {
 public:
  /// All C(D+k-1, k-1) compositions. Throws CapacityError above `cap`.
  static SimplexGrid enumerate(std::size_t k, std::uint64_t step_den, std::uint64_t cap = kDefaultGridCap);

  /// Union of two grids of the same dimension on the common denominator
  /// lcm(D1, D2), duplicates removed. Weights stay uniform over the union.
  static SimplexGrid unite(const SimplexGrid& a, const SimplexGrid& b, std::uint64_t cap = kDefaultGridCap);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::uint64_t denominator() const noexcept { return den_; }
  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }

  /// Coordinates of point i as doubles (length dim()).
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  /// Integer numerators of point i over denominator().
  [[nodiscard]] std::span<const std::uint64_t> composition(std::size_t i) const {
    return {numerators_.data() + i * dim_, dim_};
  }
  /// Row-major size() x dim() coordinate block.
  [[nodiscard]] std::span<const double> coordinates() const noexcept { return coords_; }

  [[nodiscard]] ConstantCombination combination(std::size_t i) const;

  /// Grid index of vertex e_j, or size() if absent.
  [[nodiscard]] std::size_t vertex_index(std::size_t j) const;
  [[nodiscard]] bool contains_vertices() const;

  /// Index of the point equal to the given composition over denominator(), or size().
  [[nodiscard]] std::size_t find(std::span<const std::uint64_t> composition) const;

 private:
  SimplexGrid(std::size_t dim, std::uint64_t den, std::vector<std::uint64_t> numerators);

  std::size_t dim_ = 0;
  std::uint64_t den_ = 1;
  std::vector<std::uint64_t> numerators_;
  std::vector<double> coords_;
};

}  // namespace ensemblefolio
