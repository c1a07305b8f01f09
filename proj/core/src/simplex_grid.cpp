#include "ensemblefolio/simplex_grid.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "ensemblefolio/errors.hpp"

namespace ensemblefolio {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t grid_point_count(std::size_t k, std::uint64_t step_den) {
  if (k == 0) throw ConfigError("grid dimension must be positive");
  if (step_den == 0) throw ConfigError("step denominator must be positive");
  // C(D + r, r) with r = k - 1, built as a running product of exact binomials.
  const std::uint64_t r = k - 1;
  u128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (step_den + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw CapacityError("grid point count C(" + std::to_string(step_den + r) + ", " + std::to_string(r) +
                          ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

std::uint64_t grid_memory_bytes(std::size_t k, std::uint64_t count) {
  const u128 per_point = k * (sizeof(double) + sizeof(std::uint64_t)) + 2 * sizeof(double);
  const u128 total = per_point * count;
  if (total > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(total);
}

SimplexGrid::SimplexGrid(std::size_t dim, std::uint64_t den, std::vector<std::uint64_t> numerators)
    : dim_(dim), den_(den), numerators_(std::move(numerators)), coords_(numerators_.size()) {
  const double d = static_cast<double>(den_);
  std::transform(numerators_.begin(), numerators_.end(), coords_.begin(),
                 [d](std::uint64_t c) { return static_cast<double>(c) / d; });
}

SimplexGrid SimplexGrid::enumerate(std::size_t k, std::uint64_t step_den, std::uint64_t cap) {
  const std::uint64_t count = grid_point_count(k, step_den);
  if (count > cap) {
    throw CapacityError("grid with k=" + std::to_string(k) + ", D=" + std::to_string(step_den) + " has " +
                        std::to_string(count) + " points, above the cap of " + std::to_string(cap));
  }
  std::vector<std::uint64_t> out;
  out.reserve(count * k);

  // Descending lexicographic walk over compositions of D into k parts: find the
  // rightmost non-last position with a positive entry, move one unit to its
  // right neighbour, and gather everything after it there.
  std::vector<std::uint64_t> c(k, 0);
  c[0] = step_den;
  for (;;) {
    out.insert(out.end(), c.begin(), c.end());
    if (k == 1) break;
    std::size_t i = k - 1;
    while (i > 0 && c[i - 1] == 0) --i;
    if (i == 0) break;
    const std::uint64_t tail = c[k - 1];
    c[k - 1] = 0;
    --c[i - 1];
    c[i] = tail + 1;
  }
  return SimplexGrid(k, step_den, std::move(out));
}

SimplexGrid SimplexGrid::unite(const SimplexGrid& a, const SimplexGrid& b, std::uint64_t cap) {
  if (a.dim() != b.dim()) throw ConfigError("cannot unite grids of different dimensions");
  const std::uint64_t den = std::lcm(a.denominator(), b.denominator());
  const std::uint64_t sa = den / a.denominator();
  const std::uint64_t sb = den / b.denominator();
  const std::size_t k = a.dim();

  std::vector<std::vector<std::uint64_t>> pts;
  pts.reserve(a.size() + b.size());
  auto add = [&](const SimplexGrid& g, std::uint64_t scale) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::vector<std::uint64_t> p(k);
      const auto src = g.composition(i);
      std::transform(src.begin(), src.end(), p.begin(), [scale](std::uint64_t x) { return x * scale; });
      pts.push_back(std::move(p));
    }
  };
  add(a, sa);
  add(b, sb);
  std::sort(pts.begin(), pts.end(), std::greater<>{});
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() > cap) {
    throw CapacityError("united grid has " + std::to_string(pts.size()) + " points, above the cap of " +
                        std::to_string(cap));
  }
  std::vector<std::uint64_t> flat;
  flat.reserve(pts.size() * k);
  for (const auto& p : pts) flat.insert(flat.end(), p.begin(), p.end());
  return SimplexGrid(k, den, std::move(flat));
}

ConstantCombination SimplexGrid::combination(std::size_t i) const {
  const auto p = point(i);
  Eigen::VectorXd w(static_cast<Eigen::Index>(dim_));
  for (std::size_t j = 0; j < dim_; ++j) w[static_cast<Eigen::Index>(j)] = p[j];
  return ConstantCombination(std::move(w));
}

std::size_t SimplexGrid::find(std::span<const std::uint64_t> composition) const {
  if (composition.size() != dim_) return size();
  // Points are sorted descending lexicographically.
  std::size_t lo = 0;
  std::size_t hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto c = this->composition(mid);
    if (std::lexicographical_compare(composition.begin(), composition.end(), c.begin(), c.end())) {
      lo = mid + 1;  // target < c: target lies after mid in descending order
    } else {
      hi = mid;
    }
  }
  if (lo < size()) {
    const auto c = this->composition(lo);
    if (std::equal(c.begin(), c.end(), composition.begin())) return lo;
  }
  return size();
}

std::size_t SimplexGrid::vertex_index(std::size_t j) const {
  if (j >= dim_) return size();
  std::vector<std::uint64_t> v(dim_, 0);
  v[j] = den_;
  return find(v);
}

bool SimplexGrid::contains_vertices() const {
  for (std::size_t j = 0; j < dim_; ++j) {
    if (vertex_index(j) == size()) return false;
  }
  return true;
}

}  // namespace ensemblefolio
