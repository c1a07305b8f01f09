// ensemblefolio: run ensemble experiments, inspect grids, audit bounds.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ensemblefolio/errors.hpp"
#include "ensemblefolio/experiment.hpp"

namespace ef = ensemblefolio;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, bool print_config) {
  ef::ExperimentConfig config = config_path.empty() ? ef::ExperimentConfig{} : ef::load_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (print_config) {
    std::cout << ef::to_json(config);
    return ef::kExitOk;
  }
  if (config_path.empty()) throw ef::ConfigError("run needs --config (or --print-config)");
  const ef::RunManifest m = ef::run(config);
  std::cout << "config " << m.config_hash << ", engine " << m.engine_version << "\n";
  for (const auto& [name, path] : m.files) std::cout << "  " << name << ": " << path.string() << "\n";
  std::printf("  %.3f s total\n", m.timings_seconds.at("total"));
  return ef::kExitOk;
}

int cmd_grid(std::size_t k, std::uint64_t step_den, std::uint64_t cap) {
  const ef::GridInfo g = ef::grid_info(k, step_den, cap);
  std::cout << "k=" << g.k << " D=" << g.step_den << " points=" << g.points << " bytes=" << g.bytes << "\n";
  if (!g.within_cap) {
    std::cerr << "grid exceeds the cap of " << cap << " points\n";
    return ef::kExitCapacity;
  }
  return ef::kExitOk;
}

int cmd_bound_check(const std::string& run_dir) {
  const ef::BoundCheckReport r = ef::bound_check(run_dir);
  for (const auto& msg : r.messages) std::cout << msg << "\n";
  std::cout << (r.passed ? "PASS" : "FAIL") << ": " << r.rows_checked << " rows, " << r.violations
            << " violations, " << r.continuous_violations << " above the continuous bound\n";
  return r.passed ? ef::kExitOk : ef::kExitCheckFailed;
}

int cmd_synth(std::size_t assets, std::size_t periods, std::uint64_t seed, const std::string& regime,
              const std::string& out) {
  ef::SynthRegime g;
  g.kind = ef::parse_regime_kind(regime);
  ef::write_returns_csv(ef::synth_returns(assets, periods, g, seed), out);
  std::cout << "wrote " << periods << " x " << assets << " returns to " << out << "\n";
  return ef::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal ensembles of portfolio strategies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ef::engine_version());

  std::string config_path, out_dir;
  bool print_config = false;
  auto* run = app.add_subcommand("run", "run an experiment and write its outputs");
  run->add_option("--config", config_path, "experiment config (JSON)");
  run->add_option("--out", out_dir, "output directory, overrides the config");
  run->add_flag("--print-config", print_config, "print the effective config and exit");

  std::size_t k = 2;
  std::uint64_t step_den = 2000, cap = ef::kDefaultGridCap;
  auto* grid = app.add_subcommand("grid", "count the points of a simplex grid");
  grid->add_option("--k", k, "number of components")->required();
  grid->add_option("--step-den", step_den, "step denominator D")->required();
  grid->add_option("--cap", cap, "materialization cap");

  std::string run_dir;
  auto* check = app.add_subcommand("bound-check", "audit realized gaps against the regret bounds");
  check->add_option("--run", run_dir, "run output directory")->required();

  std::size_t assets = 6, periods = 6798;
  std::uint64_t seed = 1;
  std::string regime = "iid-lognormal", synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic returns CSV");
  synth->add_option("--assets", assets, "number of assets");
  synth->add_option("--periods", periods, "number of return rows");
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--regime", regime, "iid-lognormal or regime-switching");
  synth->add_option("--out", synth_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ef::kExitOk : ef::kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, print_config);
    if (*grid) return cmd_grid(k, step_den, cap);
    if (*check) return cmd_bound_check(run_dir);
    if (*synth) return cmd_synth(assets, periods, seed, regime, synth_out);
  } catch (const ef::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ef::kExitConfig;
  } catch (const ef::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return ef::kExitData;
  } catch (const ef::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return ef::kExitCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ef::kExitCheckFailed;
  }
  return ef::kExitOk;
}
