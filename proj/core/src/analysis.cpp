#include "ensemblefolio/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ensemblefolio/errors.hpp"
#include "ensemblefolio/numeric.hpp"

namespace ensemblefolio {
namespace {

// Spread below this fraction of the mean counts as zero (round-off only).
constexpr double kZeroSpreadRelative = 1e-14;

int sign_of(double d) { return (d > 0.0) - (d < 0.0); }

}  // namespace

std::vector<double> baseline_wealth(const Eigen::MatrixXd& component_log_wealth) {
  if (component_log_wealth.cols() == 0) throw ConfigError("baseline needs at least one component");
  std::vector<double> out(static_cast<std::size_t>(component_log_wealth.rows()));
  for (Eigen::Index n = 0; n < component_log_wealth.rows(); ++n) {
    out[static_cast<std::size_t>(n)] = component_log_wealth.row(n).maxCoeff();
  }
  return out;
}

std::vector<double> benchmark_wealth(const Eigen::MatrixXd& grid_log_wealth, const SimplexGrid& grid) {
  if (!grid.contains_vertices()) throw ConfigError("benchmark grid must contain every vertex");
  if (static_cast<std::size_t>(grid_log_wealth.cols()) != grid.size()) {
    throw ConfigError("grid wealth history does not match the grid");
  }
  std::vector<double> out(static_cast<std::size_t>(grid_log_wealth.rows()));
  for (Eigen::Index n = 0; n < grid_log_wealth.rows(); ++n) {
    out[static_cast<std::size_t>(n)] = grid_log_wealth.row(n).maxCoeff();
  }
  return out;
}

std::size_t best_grid_index(const WealthLedger& grid_ledger) {
  const auto lw = grid_ledger.log_wealth();
  if (lw.empty()) throw ConfigError("grid ledger is empty");
  return static_cast<std::size_t>(std::max_element(lw.begin(), lw.end()) - lw.begin());
}

ConstantCombination best_constant_combination(const SimplexGrid& grid, const WealthLedger& grid_ledger) {
  if (grid_ledger.size() != grid.size()) throw ConfigError("grid ledger does not match the grid");
  return grid.combination(best_grid_index(grid_ledger));
}

double small_scale_bound(std::size_t k, std::size_t n) {
  if (k == 0) throw DomainError("bound needs k >= 1");
  return static_cast<double>(k - 1) * std::log1p(static_cast<double>(n));
}

double large_scale_bound(std::size_t base_sets, std::size_t n, double eps) {
  if (base_sets == 0) throw DomainError("bound needs N >= 1");
  if (!(eps > 0.0) || eps > 1.0) throw DomainError("minimal mass must lie in (0, 1]");
  return static_cast<double>(base_sets - 1) * std::log1p(static_cast<double>(n)) - std::log(eps);
}

double epsilon_n(const Partition& partition, const WealthLedger& comp_ledger) {
  if (comp_ledger.size() != partition.components()) throw ConfigError("ledger does not match the partition");
  double eps = 1.0;
  for (std::size_t i = 0; i < partition.base_sets(); ++i) {
    const auto& members = partition.members(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < members.size(); ++j) {
      const double a = comp_ledger.log_wealth(members[j]);
      const double b = comp_ledger.log_wealth(members[best]);
      if (a > b || (a == b && members[j] < members[best])) best = j;
    }
    eps = std::min(eps, partition.masses(i)[best]);
  }
  return eps;
}

ExceedanceReport exceedance_report(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("wealth paths have different lengths");
  ExceedanceReport rep;
  rep.horizon = a.size();
  int previous = 0;
  std::optional<std::size_t> streak_start;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const std::size_t n = t + 1;
    const int s = sign_of(a[t] - b[t]);
    if (s > 0) {
      ++rep.exceed_count;
      if (!streak_start) streak_start = n;
    } else {
      streak_start.reset();
      if (s < 0) ++rep.opposing_exceed_count;
    }
    if (t > 0 && s != previous) {
      ++rep.crossing_count;
      rep.last_crossing = n;
    }
    previous = s;
  }
  rep.always_exceeds_from = streak_start;
  return rep;
}

MetricsReport metrics(std::span<const double> log_wealth, std::span<const double> returns) {
  if (log_wealth.size() != returns.size()) throw ConfigError("log-wealth and return paths have different lengths");
  const std::size_t n = returns.size();
  if (n < 2) throw InsufficientDataError("metrics need at least two periods");
  MetricsReport rep;
  rep.periods = n;
  rep.final_wealth = std::exp(log_wealth.back());
  rep.avg_growth_rate = log_wealth.back() / static_cast<double>(n);
  rep.avg_return = numeric::pairwise_sum(returns) / static_cast<double>(n);
  std::vector<double> sq(n);
  std::transform(returns.begin(), returns.end(), sq.begin(), [&](double r) {
    const double d = r - rep.avg_return;
    return d * d;
  });
  const double sd = std::sqrt(numeric::pairwise_sum(sq) / static_cast<double>(n - 1));
  if (sd <= kZeroSpreadRelative * std::abs(rep.avg_return)) {
    rep.sharpe = std::numeric_limits<double>::infinity();
    rep.sharpe_infinite = true;
  } else {
    rep.sharpe = rep.avg_return / sd;
  }
  return rep;
}

BoundCurve growth_gap_series(std::span<const double> log_a, std::span<const double> log_b) {
  if (log_a.size() != log_b.size()) throw ConfigError("log-wealth paths have different lengths");
  BoundCurve out;
  out.realized.resize(log_a.size());
  for (std::size_t t = 0; t < log_a.size(); ++t) {
    out.realized[t] = (log_a[t] - log_b[t]) / static_cast<double>(t + 1);
  }
  return out;
}

DominanceReport dominance_reduction_check(const Eigen::MatrixXd& component_returns, const Partition& partition,
                                          std::uint64_t step_den, double tolerance) {
  const auto k = static_cast<std::size_t>(component_returns.cols());
  if (k != partition.components()) throw ConfigError("returns do not match the partition");
  DominanceReport rep;

  for (std::size_t i = 0; i < partition.base_sets(); ++i) {
    const auto& members = partition.members(i);
    std::optional<std::size_t> found;
    for (std::size_t cand : members) {
      bool dominates = true;
      for (Eigen::Index t = 0; t < component_returns.rows() && dominates; ++t) {
        for (std::size_t other : members) {
          if (component_returns(t, static_cast<Eigen::Index>(cand)) <
              component_returns(t, static_cast<Eigen::Index>(other))) {
            dominates = false;
            break;
          }
        }
      }
      if (dominates) {
        found = cand;
        break;
      }
    }
    if (!found) {
      rep.violating_set = i;
      rep.dominating.clear();
      return rep;
    }
    rep.dominating.push_back(*found);
  }
  rep.precondition_met = true;

  const std::size_t h = rep.dominating.size();
  const SimplexGrid full = SimplexGrid::enumerate(k, step_den);
  const SimplexGrid reduced = SimplexGrid::enumerate(h, step_den);
  WealthLedger full_ledger(full.size());
  WealthLedger reduced_ledger(reduced.size());

  std::vector<bool> on_dominating(k, false);
  for (std::size_t a : rep.dominating) on_dominating[a] = true;

  std::vector<double> buf;
  bool equal = true;
  bool supported = true;
  for (Eigen::Index t = 0; t < component_returns.rows(); ++t) {
    buf.resize(full.size());
    for (std::size_t p = 0; p < full.size(); ++p) {
      const auto lambda = full.point(p);
      double r = 0.0;
      for (std::size_t a = 0; a < k; ++a) r += lambda[a] * component_returns(t, static_cast<Eigen::Index>(a));
      buf[p] = r;
    }
    full_ledger.update(buf);
    buf.resize(reduced.size());
    for (std::size_t p = 0; p < reduced.size(); ++p) {
      const auto gamma = reduced.point(p);
      double r = 0.0;
      for (std::size_t j = 0; j < h; ++j) r += gamma[j] * component_returns(t, static_cast<Eigen::Index>(rep.dominating[j]));
      buf[p] = r;
    }
    reduced_ledger.update(buf);

    const std::size_t best_full = best_grid_index(full_ledger);
    const double lf = full_ledger.log_wealth(best_full);
    const double lr = reduced_ledger.log_wealth(best_grid_index(reduced_ledger));
    const double gap = std::abs(std::expm1(lf - lr));
    rep.max_relative_gap = std::max(rep.max_relative_gap, gap);
    if (gap > tolerance) equal = false;
    const auto lambda = full.point(best_full);
    for (std::size_t a = 0; a < k; ++a) {
      if (lambda[a] > 0.0 && !on_dominating[a]) supported = false;
    }
    if (t + 1 == component_returns.rows()) rep.final_best = full.combination(best_full);
  }
  rep.equal = equal;
  rep.argmax_on_dominating = supported;
  return rep;
}

}  // namespace ensemblefolio
