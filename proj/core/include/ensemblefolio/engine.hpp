#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensemblefolio/ensemble.hpp"
#include "ensemblefolio/parallel.hpp"
#include "ensemblefolio/simplex_grid.hpp"

namespace ensemblefolio {

enum class EnsembleKind { UC, WAE, FL, UCW, UCL, UCLarge };

/// Parses "uc", "wae", "fl", "ucw", "ucl" or "uc-large".
EnsembleKind parse_ensemble_kind(std::string_view name);
std::string_view to_string(EnsembleKind kind);

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::UC;
  double support_fraction = 1.0;  // UC-W / UC-L only

  /// Column name in output files: "uc", "ucw_0.3", "uc_large", ...
  [[nodiscard]] std::string name() const;
};

struct EngineSetup {
  std::size_t components = 0;  // k
  std::size_t assets = 0;      // m
  std::vector<EnsembleSpec> ensembles;
  std::shared_ptr<const SimplexGrid> grid;        // over B^k
  std::optional<Partition> partition;             // required for UC-large
  std::shared_ptr<const SimplexGrid> large_grid;  // over B^N, required for UC-large
};

/// Everything the engine emitted for one period.
struct PeriodRecord {
  std::vector<double> component_returns;
  std::vector<Portfolio> ensemble_portfolios;
  std::vector<double> ensemble_returns;
  std::vector<std::vector<double>> allocations;  // per ensemble, one share per component
  std::vector<Portfolio> representatives;        // empty without a partition
};

/// Drives every ensemble one period at a time. Portfolios for period n are
/// built from the ledgers at n-1, then all ledgers are committed with x_n.
/// Ledgers are owned here; callers get read-only views between periods.
class EnsembleEngine {
 public:
  EnsembleEngine(EngineSetup setup, ThreadPool& pool);

  PeriodRecord step(std::span<const Portfolio> comps, const Eigen::VectorXd& x);

  [[nodiscard]] std::size_t period() const noexcept { return components_.period(); }
  [[nodiscard]] const EngineSetup& setup() const noexcept { return setup_; }
  [[nodiscard]] const WealthLedger& component_ledger() const noexcept { return components_; }
  [[nodiscard]] const WealthLedger& grid_ledger() const noexcept { return grid_; }
  [[nodiscard]] const WealthLedger& ensemble_ledger() const noexcept { return ensembles_; }
  [[nodiscard]] const WealthLedger& representative_ledger() const noexcept { return representatives_; }
  [[nodiscard]] const WealthLedger& large_grid_ledger() const noexcept { return large_grid_; }

 private:
  void commit_grid(const SimplexGrid& grid, WealthLedger& ledger, std::span<const double> entity_returns);

  EngineSetup setup_;
  ThreadPool& pool_;
  WealthLedger components_;
  WealthLedger grid_;
  WealthLedger ensembles_;
  WealthLedger representatives_;
  WealthLedger large_grid_;
  std::vector<double> scratch_;
};

}  // namespace ensemblefolio
