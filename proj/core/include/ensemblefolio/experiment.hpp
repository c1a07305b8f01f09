#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ensemblefolio/analysis.hpp"
#include "ensemblefolio/engine.hpp"
#include "ensemblefolio/market_data.hpp"
#include "ensemblefolio/simplex_grid.hpp"

namespace ensemblefolio {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitCapacity = 4,
};

struct DataSource {
  enum class Kind { Synthetic, Prices, Returns };
  Kind kind = Kind::Synthetic;
  std::filesystem::path path;  // Prices / Returns
  std::size_t assets = 6;      // Synthetic
  std::size_t periods = 6798;  // Synthetic, return rows
  SynthRegime regime;
};

/// Declarative description of one experiment. Every field has a default; the
/// JSON form written by to_json lists all of them.
struct ExperimentConfig {
  DataSource data;
  std::size_t window = 20;
  std::size_t burn_in = 20;
  std::vector<double> alphas{0.005, 1.0};
  std::vector<EnsembleSpec> ensembles{{EnsembleKind::UC, 1.0}, {EnsembleKind::WAE, 1.0}, {EnsembleKind::FL, 1.0}};
  std::uint64_t step_den = 2000;
  std::vector<std::uint64_t> extra_step_dens;  // unioned into the grid
  std::uint64_t grid_cap = kDefaultGridCap;
  std::vector<std::vector<std::size_t>> partition;  // base sets, required for uc-large
  std::vector<std::vector<double>> masses;          // empty: uniform within each set
  std::uint64_t large_step_den = 20;
  double solver_tol = 1e-10;
  std::size_t max_iterations = 10'000;
  std::filesystem::path output_dir = "ensemblefolio-out";
  std::uint64_t seed = 1;

  /// Throws ConfigError (or PartitionError) describing the first problem.
  void validate() const;
  [[nodiscard]] bool uses_large() const;
};

/// Parses the JSON config document; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& config);

/// Stable 64-bit FNV-1a hash of the config (output directory excluded), hex.
std::string config_hash(const ExperimentConfig& config);

/// Loads or synthesizes the return series described by the config.
ReturnSeries load_data(const ExperimentConfig& config);

/// Complete per-period history of a run over the tradable periods.
struct RunHistory {
  std::vector<std::string> dates;
  std::vector<std::string> component_names;
  std::vector<std::string> ensemble_names;
  std::size_t grid_points = 0;
  std::size_t large_grid_points = 0;
  std::size_t base_sets = 0;

  Eigen::MatrixXd log_wealth;  // periods x (components then ensembles)
  Eigen::MatrixXd returns;     // same layout, gross returns
  std::vector<double> baseline_log;
  std::vector<double> benchmark_log;
  std::vector<std::size_t> benchmark_index;
  std::vector<ConstantCombination> best_lambda;
  std::vector<Eigen::MatrixXd> allocations;  // per ensemble: periods x components
  std::vector<double> epsilon;               // per period, with a partition
  std::vector<std::size_t> large_benchmark_index;
  std::vector<ConstantCombination> best_large_lambda;

  [[nodiscard]] std::size_t periods() const noexcept { return static_cast<std::size_t>(log_wealth.rows()); }
  [[nodiscard]] std::vector<std::string> strategy_names() const;
  [[nodiscard]] std::vector<double> log_wealth_of(std::size_t column) const;
  [[nodiscard]] std::vector<double> returns_of(std::size_t column) const;
};

/// Runs every configured ensemble over the tradable periods of `returns`.
RunHistory simulate(const ExperimentConfig& config, const ReturnSeries& returns, ThreadPool& pool);

struct RunManifest {
  std::string config_hash;
  std::string engine_version;
  std::map<std::string, std::filesystem::path> files;  // wealth, metrics, allocations, lambda_best, gaps, bounds
  std::map<std::string, double> timings_seconds;
};

/// Writes the six output files plus config.json and manifest.json.
RunManifest write_outputs(const ExperimentConfig& config, const RunHistory& history,
                          const std::filesystem::path& out_dir);

/// Load, simulate and write. `threads` == 0 reads ENSEMBLEFOLIO_THREADS.
RunManifest run(const ExperimentConfig& config, std::size_t threads = 0);

std::string engine_version();

/// Metrics per strategy recomputed from a run's wealth.csv.
std::map<std::string, MetricsReport> metrics_from_wealth_csv(const std::filesystem::path& wealth_csv);

struct GridInfo {
  std::size_t k = 0;
  std::uint64_t step_den = 0;
  std::uint64_t points = 0;
  std::uint64_t bytes = 0;
  bool within_cap = true;
};

/// Point count and memory estimate without materializing the grid.
GridInfo grid_info(std::size_t k, std::uint64_t step_den, std::uint64_t cap = kDefaultGridCap);

struct BoundCheckReport {
  bool passed = true;
  std::size_t rows_checked = 0;
  std::size_t violations = 0;
  std::size_t continuous_violations = 0;  // informational
  std::vector<std::string> messages;
};

/// Re-derives every realized gap from wealth.csv and gaps.csv and checks it
/// against the bounds recorded in bounds.csv. Throws DataError if files are missing.
BoundCheckReport bound_check(const std::filesystem::path& run_dir);

}  // namespace ensemblefolio
