#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ensemblefolio/ensemble.hpp"
#include "ensemblefolio/simplex_grid.hpp"

namespace ensemblefolio {

/// Performance summary of one strategy over n periods.
struct MetricsReport {
  std::size_t periods = 0;
  double final_wealth = 1.0;      // S_n
  double avg_growth_rate = 0.0;   // (1/n) log S_n, nats per period
  double avg_return = 0.0;        // mean gross return per period
  double sharpe = 0.0;            // mean / sample std of gross returns
  bool sharpe_infinite = false;   // set when the returns have no spread
};

/// Finite-horizon comparison of two wealth paths A and B (1-based periods).
struct ExceedanceReport {
  std::size_t horizon = 0;
  std::size_t exceed_count = 0;           // #{n : A_n > B_n}
  std::size_t opposing_exceed_count = 0;  // #{n : B_n > A_n}
  std::size_t crossing_count = 0;         // sign changes of A_n - B_n
  std::optional<std::size_t> last_crossing;
  std::optional<std::size_t> always_exceeds_from;  // smallest M with A_n > B_n for all n >= M
};

/// Per-period realized gap with the matching bound (empty when no bound applies).
struct BoundCurve {
  std::vector<double> realized;
  std::vector<double> bound;
};

/// Per-period maximum over components of log S_n. Rows are periods.
std::vector<double> baseline_wealth(const Eigen::MatrixXd& component_log_wealth);

/// Per-period maximum over grid points of log S_n. The grid must contain
/// every vertex (ConfigError otherwise), which makes it >= the baseline.
std::vector<double> benchmark_wealth(const Eigen::MatrixXd& grid_log_wealth, const SimplexGrid& grid);

/// Index of the wealthiest grid point; ties go to the lowest index.
std::size_t best_grid_index(const WealthLedger& grid_ledger);
ConstantCombination best_constant_combination(const SimplexGrid& grid, const WealthLedger& grid_ledger);

/// (k - 1) log(n + 1).
double small_scale_bound(std::size_t k, std::size_t n);

/// (N - 1) log(n + 1) - log(eps); DomainError unless eps lies in (0, 1].
double large_scale_bound(std::size_t base_sets, std::size_t n, double eps);

/// Smallest mass any base set puts on its wealthiest member (ties to the
/// lowest component index).
double epsilon_n(const Partition& partition, const WealthLedger& comp_ledger);

/// Inputs are wealth or log-wealth paths of equal length.
ExceedanceReport exceedance_report(std::span<const double> a, std::span<const double> b);

/// log_wealth[t] is log S_{t+1}; returns[t] is the gross return of period t+1.
/// Needs n >= 2. Sample standard deviation uses divisor n - 1.
MetricsReport metrics(std::span<const double> log_wealth, std::span<const double> returns);

/// W_n(a) - W_n(b) from log-wealth paths; `bound` is left empty.
BoundCurve growth_gap_series(std::span<const double> log_a, std::span<const double> log_b);

struct DominanceReport {
  bool precondition_met = false;
  std::optional<std::size_t> violating_set;  // first base set without a dominating member
  std::vector<std::size_t> dominating;       // one member per base set
  std::optional<bool> equal;                 // verdict; empty when the precondition fails
  double max_relative_gap = 0.0;             // max_n |S_full / S_reduced - 1|
  bool argmax_on_dominating = false;         // best full-grid lambda is supported on `dominating` every period
  std::optional<ConstantCombination> final_best;
};

/// Compares, period by period, the best constant combination over all k
/// components with the best one over the dominating members only, both on
/// step-1/D grids. Rows of component_returns are periods.
DominanceReport dominance_reduction_check(const Eigen::MatrixXd& component_returns, const Partition& partition,
                                          std::uint64_t step_den = 20, double tolerance = 1e-9);

}  // namespace ensemblefolio
