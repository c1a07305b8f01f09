#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ensemblefolio/parallel.hpp"
#include "ensemblefolio/simplex_grid.hpp"
#include "ensemblefolio/simplex_vector.hpp"

namespace ensemblefolio {

/// Log cumulative wealth (nats) of a fixed set of entities. Starts at zero
/// (S_0 = 1); period() counts committed updates.
class WealthLedger {
 public:
  explicit WealthLedger(std::size_t entities = 0) : log_wealth_(entities, 0.0) {}

  [[nodiscard]] std::size_t size() const noexcept { return log_wealth_.size(); }
  [[nodiscard]] std::size_t period() const noexcept { return period_; }
  [[nodiscard]] std::span<const double> log_wealth() const noexcept { return log_wealth_; }
  [[nodiscard]] double log_wealth(std::size_t i) const { return log_wealth_.at(i); }

  /// Adds log(returns[i]) to entity i. Throws DataError for a non-positive
  /// return and ConfigError on a size mismatch; the ledger is unchanged on error.
  void update(std::span<const double> gross_returns);

  /// Adds pre-computed log returns (must be finite).
  void update_log(std::span<const double> log_returns);

 private:
  std::vector<double> log_wealth_;
  std::size_t period_ = 0;
};

/// Functional form of WealthLedger::update.
WealthLedger update_ledger(WealthLedger ledger, std::span<const double> gross_returns);

/// Disjoint non-empty base sets covering the component indices [0, k), each
/// with a probability mass over its members.
class Partition {
 public:
  Partition(std::vector<std::vector<std::size_t>> sets, std::vector<std::vector<double>> masses, std::size_t k);

  static Partition uniform(std::vector<std::vector<std::size_t>> sets, std::size_t k);
  static Partition singletons(std::size_t k);

  [[nodiscard]] std::size_t base_sets() const noexcept { return sets_.size(); }
  [[nodiscard]] std::size_t components() const noexcept { return set_of_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& members(std::size_t i) const { return sets_.at(i); }
  [[nodiscard]] const std::vector<double>& masses(std::size_t i) const { return masses_.at(i); }
  [[nodiscard]] std::size_t set_of(std::size_t component) const { return set_of_.at(component); }

 private:
  std::vector<std::vector<std::size_t>> sets_;
  std::vector<std::vector<double>> masses_;
  std::vector<std::size_t> set_of_;
};

/// Grid indices a mixture is restricted to, ascending.
struct SupportMask {
  std::vector<std::size_t> included;
  double fraction = 1.0;
};

/// Capital share per component strategy.
struct AllocationDistribution {
  std::vector<double> weights;
};

/// sum_a lambda_a * comps[a].
Portfolio constant_combo_portfolio(const ConstantCombination& lambda, std::span<const Portfolio> comps);

/// sum_a coeffs[a] * comps[a], renormalized onto the simplex.
Portfolio mix_portfolios(std::span<const double> coeffs, std::span<const Portfolio> comps);

/// Wealth-weighted grid average of lambda: c_a = sum_l w_l lambda_{l,a} with
/// w_l proportional to S_{n-1}(b^lambda) on the support. The reduction runs in
/// grid order with pairwise sums, so the result is independent of `pool`.
std::vector<double> grid_mixture_coefficients(const SimplexGrid& grid, const WealthLedger& grid_ledger,
                                              const std::optional<SupportMask>& mask = std::nullopt,
                                              ThreadPool* pool = nullptr);

/// Universal combination over the grid of constant combinations.
Portfolio uc_portfolio(const SimplexGrid& grid, const WealthLedger& grid_ledger, std::span<const Portfolio> comps,
                       const std::optional<SupportMask>& mask = std::nullopt);

/// Top ceil(p * |grid|) points by past wealth, ties to the lower index.
SupportMask support_winners(const WealthLedger& grid_ledger, double p);
/// Bottom ceil(p * |grid|) points by past wealth, ties to the lower index.
SupportMask support_losers(const WealthLedger& grid_ledger, double p);

/// Within-set mixture weights proportional to S_{n-1}(b^a) * mu(a); the masses
/// themselves before any period has been committed.
std::vector<double> representative_weights(std::span<const std::size_t> members, std::span<const double> masses,
                                           const WealthLedger& comp_ledger);

Portfolio representative_portfolio(std::span<const std::size_t> members, std::span<const double> masses,
                                   const WealthLedger& comp_ledger, std::span<const Portfolio> comps);

/// Universal combination over constant combinations of the N representatives.
Portfolio uc_large_portfolio(const SimplexGrid& grid, const WealthLedger& grid_ledger,
                             std::span<const Portfolio> reps, const std::optional<SupportMask>& mask = std::nullopt);

/// Per-component capital shares of the large-scale combination: outer grid
/// weight of each base set times the within-set representative weight.
AllocationDistribution allocation_distribution(const SimplexGrid& grid, const WealthLedger& grid_ledger,
                                               const WealthLedger& comp_ledger, const Partition& partition);

/// Wealth-weighted average of the component portfolios.
Portfolio wae_portfolio(const WealthLedger& comp_ledger, std::span<const Portfolio> comps);
std::vector<double> wae_weights(const WealthLedger& comp_ledger);

/// Equal average before any history, else the portfolio of the wealthiest
/// component (ties to the lowest index).
Portfolio fl_portfolio(const WealthLedger& comp_ledger, std::span<const Portfolio> comps);
std::vector<double> fl_weights(const WealthLedger& comp_ledger);

}  // namespace ensemblefolio
