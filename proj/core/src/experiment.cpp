#include "ensemblefolio/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ensemblefolio/csv.hpp"
#include "ensemblefolio/errors.hpp"
#include "ensemblefolio/strategies.hpp"
#include "json.hpp"

#ifndef ENSEMBLEFOLIO_VERSION
#define ENSEMBLEFOLIO_VERSION "0.0.0"
#endif

namespace ensemblefolio {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kBoundSlack = 1e-12;
constexpr double kConsistencyTolerance = 1e-9;

// ---- config parsing -------------------------------------------------------

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T read(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

const json& object_at(const json& obj, const char* key) {
  static const json empty = json::object();
  const auto it = obj.find(key);
  if (it == obj.end()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config key '") + key + "' must be an object");
  return *it;
}

std::vector<double> fractions_for(const json& fractions, const char* kind) {
  const auto it = fractions.find(kind);
  if (it == fractions.end()) return {0.3};
  if (it->is_number()) return {it->get<double>()};
  try {
    return it->get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("support_fractions.") + kind + " must be a number or a list of numbers");
  }
}

std::string_view source_name(DataSource::Kind kind) {
  switch (kind) {
    case DataSource::Kind::Synthetic: return "synth";
    case DataSource::Kind::Prices: return "prices";
    case DataSource::Kind::Returns: return "returns";
  }
  return "?";
}

json config_json(const ExperimentConfig& c, bool with_output) {
  json data;
  data["source"] = source_name(c.data.kind);
  if (c.data.kind == DataSource::Kind::Synthetic) {
    const SynthRegime& g = c.data.regime;
    data["assets"] = c.data.assets;
    data["periods"] = c.data.periods;
    data["regime"] = to_string(g.kind);
    data["band"] = {g.band_lo, g.band_hi};
    data["drift"] = g.drift;
    data["drift_spread"] = g.drift_spread;
    data["vol"] = g.vol;
    data["vol_spread"] = g.vol_spread;
    data["turbulent_drift"] = g.turbulent_drift;
    data["turbulent_vol_scale"] = g.turbulent_vol_scale;
    data["switch_probability"] = g.switch_probability;
  } else {
    data["path"] = c.data.path.string();
  }

  json kinds = json::array();
  json fractions = json::object();
  for (const auto& e : c.ensembles) {
    const std::string kind(to_string(e.kind));
    if (e.kind == EnsembleKind::UCW || e.kind == EnsembleKind::UCL) {
      if (!fractions.contains(kind)) {
        kinds.push_back(kind);
        fractions[kind] = json::array();
      }
      fractions[kind].push_back(e.support_fraction);
    } else {
      kinds.push_back(kind);
    }
  }

  json j;
  j["data"] = data;
  j["window"] = c.window;
  j["burn_in"] = c.burn_in;
  j["alphas"] = c.alphas;
  j["ensembles"] = kinds;
  j["support_fractions"] = fractions;
  j["grid"] = {{"step_den", c.step_den}, {"extra_step_dens", c.extra_step_dens}, {"cap", c.grid_cap}};
  json large;
  large["step_den"] = c.large_step_den;
  large["partition"] = c.partition;
  if (c.masses.empty()) {
    large["masses"] = "uniform";
  } else {
    large["masses"] = c.masses;
  }
  j["large"] = large;
  j["solver"] = {{"tol", c.solver_tol}, {"max_iterations", c.max_iterations}};
  if (with_output) j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  return j;
}

// ---- output helpers --------------------------------------------------------

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& fields) { out_ << csv::join(fields) << '\n'; }
  void close() {
    out_.close();
    if (!out_) throw DataError("failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string num(double v) { return csv::format_double(v); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

struct StrategyBound {
  std::string strategy;
  std::string reference;  // "benchmark" or "baseline"
  std::size_t dimension;
  std::size_t grid_points;
};

double grid_bound(std::size_t grid_points, double eps) {
  return std::log(static_cast<double>(grid_points)) - std::log(eps);
}

double continuous_bound(std::size_t dimension, std::size_t n, double eps) {
  return static_cast<double>(dimension - 1) * std::log1p(static_cast<double>(n)) - std::log(eps);
}

csv::Table read_run_table(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("missing run file " + path.string());
  try {
    return csv::read_table(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

double cell(const csv::Table& t, std::size_t row, std::size_t col) {
  try {
    return csv::parse_double(t.rows.at(row).at(col));
  } catch (const std::exception&) {
    throw DataError("malformed number at row " + std::to_string(row + 2) + ", column " + std::to_string(col + 1));
  }
}

std::size_t column_of(const csv::Table& t, std::string_view name, const fs::path& file) {
  try {
    return t.column(name);
  } catch (const std::out_of_range&) {
    throw DataError(file.string() + " has no column '" + std::string(name) + "'");
  }
}

}  // namespace

// ---- config -------------------------------------------------------------------

bool ExperimentConfig::uses_large() const {
  return std::any_of(ensembles.begin(), ensembles.end(),
                     [](const EnsembleSpec& e) { return e.kind == EnsembleKind::UCLarge; });
}

void ExperimentConfig::validate() const {
  if (alphas.empty()) throw ConfigError("alphas must list at least one risk aversion");
  std::set<std::string> names;
  for (double a : alphas) {
    MVConfig{a, window, solver_tol, max_iterations}.validate();
    if (!names.insert(mv_strategy_name(a)).second) throw ConfigError("duplicate risk aversion " + num(a));
  }
  if (burn_in < window) throw ConfigError("burn_in must be at least the rolling window");
  std::set<std::string> ens;
  for (const auto& e : ensembles) {
    if ((e.kind == EnsembleKind::UCW || e.kind == EnsembleKind::UCL) &&
        (!(e.support_fraction > 0.0) || e.support_fraction > 1.0)) {
      throw ConfigError("support fraction must lie in (0, 1]");
    }
    if (!ens.insert(e.name()).second) throw ConfigError("ensemble '" + e.name() + "' is listed twice");
  }
  if (step_den == 0) throw ConfigError("grid step_den must be positive");
  for (auto d : extra_step_dens) {
    if (d == 0) throw ConfigError("extra step denominators must be positive");
  }
  if (grid_cap == 0) throw ConfigError("grid cap must be positive");
  if (uses_large()) {
    if (partition.empty()) throw ConfigError("uc-large needs an explicit partition");
    if (large_step_den == 0) throw ConfigError("large step_den must be positive");
  }
  if (!partition.empty()) {
    if (masses.empty()) {
      Partition::uniform(partition, alphas.size());
    } else {
      Partition(partition, masses, alphas.size());
    }
  }
  if (data.kind == DataSource::Kind::Synthetic) {
    if (data.assets < 2) throw ConfigError("synthetic data needs at least two assets");
    if (data.periods < 1) throw ConfigError("synthetic data needs at least one period");
    if (!(data.regime.band_lo > 0.0) || data.regime.band_hi < data.regime.band_lo) {
      throw ConfigError("synthetic band must satisfy 0 < lo <= hi");
    }
  } else if (data.path.empty()) {
    throw ConfigError("data.path is required for file sources");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, "config", {"data", "window", "burn_in", "alphas", "ensembles", "support_fractions", "grid",
                               "large", "solver", "output_dir", "seed"});

  ExperimentConfig c;
  const json& data = object_at(j, "data");
  const std::string source = read<std::string>(data, "source", "synth");
  if (source == "synth") {
    reject_unknown(data, "data", {"source", "assets", "periods", "regime", "band", "drift", "drift_spread", "vol",
                                  "vol_spread", "turbulent_drift", "turbulent_vol_scale", "switch_probability"});
    c.data.kind = DataSource::Kind::Synthetic;
    c.data.assets = read<std::size_t>(data, "assets", c.data.assets);
    c.data.periods = read<std::size_t>(data, "periods", c.data.periods);
    SynthRegime& g = c.data.regime;
    g.kind = parse_regime_kind(read<std::string>(data, "regime", std::string(to_string(g.kind))));
    const auto band = read<std::vector<double>>(data, "band", {g.band_lo, g.band_hi});
    if (band.size() != 2) throw ConfigError("data.band must have two entries");
    g.band_lo = band[0];
    g.band_hi = band[1];
    g.drift = read<double>(data, "drift", g.drift);
    g.drift_spread = read<double>(data, "drift_spread", g.drift_spread);
    g.vol = read<double>(data, "vol", g.vol);
    g.vol_spread = read<double>(data, "vol_spread", g.vol_spread);
    g.turbulent_drift = read<double>(data, "turbulent_drift", g.turbulent_drift);
    g.turbulent_vol_scale = read<double>(data, "turbulent_vol_scale", g.turbulent_vol_scale);
    g.switch_probability = read<double>(data, "switch_probability", g.switch_probability);
  } else if (source == "prices" || source == "returns") {
    reject_unknown(data, "data", {"source", "path"});
    c.data.kind = source == "prices" ? DataSource::Kind::Prices : DataSource::Kind::Returns;
    c.data.path = read<std::string>(data, "path", "");
  } else {
    throw ConfigError("data.source must be 'synth', 'prices' or 'returns'");
  }

  c.window = read<std::size_t>(j, "window", c.window);
  c.burn_in = read<std::size_t>(j, "burn_in", c.window);
  c.alphas = read<std::vector<double>>(j, "alphas", c.alphas);

  const json& fractions = object_at(j, "support_fractions");
  reject_unknown(fractions, "support_fractions", {"ucw", "ucl"});
  if (j.contains("ensembles")) {
    c.ensembles.clear();
    for (const auto& name : read<std::vector<std::string>>(j, "ensembles", {})) {
      const EnsembleKind kind = parse_ensemble_kind(name);
      if (kind == EnsembleKind::UCW || kind == EnsembleKind::UCL) {
        for (double p : fractions_for(fractions, name.c_str())) c.ensembles.push_back({kind, p});
      } else {
        c.ensembles.push_back({kind, 1.0});
      }
    }
  }

  const json& grid = object_at(j, "grid");
  reject_unknown(grid, "grid", {"step_den", "extra_step_dens", "cap"});
  c.step_den = read<std::uint64_t>(grid, "step_den", c.step_den);
  c.extra_step_dens = read<std::vector<std::uint64_t>>(grid, "extra_step_dens", {});
  c.grid_cap = read<std::uint64_t>(grid, "cap", c.grid_cap);

  const json& large = object_at(j, "large");
  reject_unknown(large, "large", {"step_den", "partition", "masses"});
  c.large_step_den = read<std::uint64_t>(large, "step_den", c.large_step_den);
  c.partition = read<std::vector<std::vector<std::size_t>>>(large, "partition", {});
  if (const auto it = large.find("masses"); it != large.end() && !(it->is_string() && *it == "uniform")) {
    c.masses = read<std::vector<std::vector<double>>>(large, "masses", {});
  }

  const json& solver = object_at(j, "solver");
  reject_unknown(solver, "solver", {"tol", "max_iterations"});
  c.solver_tol = read<double>(solver, "tol", c.solver_tol);
  c.max_iterations = read<std::size_t>(solver, "max_iterations", c.max_iterations);

  c.output_dir = read<std::string>(j, "output_dir", c.output_dir.string());
  c.seed = read<std::uint64_t>(j, "seed", c.seed);
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& config) { return config_json(config, true).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = config_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string engine_version() { return ENSEMBLEFOLIO_VERSION; }

// ---- data -------------------------------------------------------------------

ReturnSeries load_data(const ExperimentConfig& config) {
  ReturnSeries r;
  switch (config.data.kind) {
    case DataSource::Kind::Synthetic:
      r = synth_returns(config.data.assets, config.data.periods, config.data.regime, config.seed);
      break;
    case DataSource::Kind::Prices:
      r = prices_to_returns(load_prices(config.data.path));
      break;
    case DataSource::Kind::Returns:
      r = load_returns(config.data.path);
      break;
  }
  validate(r);
  return r;
}

// ---- simulation -------------------------------------------------------------

std::vector<std::string> RunHistory::strategy_names() const {
  std::vector<std::string> out = component_names;
  out.insert(out.end(), ensemble_names.begin(), ensemble_names.end());
  return out;
}

std::vector<double> RunHistory::log_wealth_of(std::size_t column) const {
  const auto c = log_wealth.col(static_cast<Eigen::Index>(column));
  return {c.data(), c.data() + c.size()};
}

std::vector<double> RunHistory::returns_of(std::size_t column) const {
  const auto c = returns.col(static_cast<Eigen::Index>(column));
  return {c.data(), c.data() + c.size()};
}

RunHistory simulate(const ExperimentConfig& config, const ReturnSeries& returns, ThreadPool& pool) {
  config.validate();
  validate(returns);
  const std::size_t k = config.alphas.size();
  const std::size_t m = returns.assets();
  const std::size_t total = returns.periods();
  if (total < config.burn_in + 2) {
    throw InsufficientDataError("need at least " + std::to_string(config.burn_in + 2) + " return rows, got " +
                                std::to_string(total));
  }
  const std::size_t periods = total - config.burn_in;

  std::vector<MeanVarianceStrategy> strategies;
  strategies.reserve(k);
  for (double a : config.alphas) strategies.emplace_back(MVConfig{a, config.window, config.solver_tol, config.max_iterations});

  auto grid = std::make_shared<SimplexGrid>(SimplexGrid::enumerate(k, config.step_den, config.grid_cap));
  for (auto d : config.extra_step_dens) {
    grid = std::make_shared<SimplexGrid>(SimplexGrid::unite(*grid, SimplexGrid::enumerate(k, d, config.grid_cap), config.grid_cap));
  }

  EngineSetup setup;
  setup.components = k;
  setup.assets = m;
  setup.ensembles = config.ensembles;
  setup.grid = grid;
  if (config.uses_large()) {
    setup.partition = config.masses.empty() ? Partition::uniform(config.partition, k)
                                            : Partition(config.partition, config.masses, k);
    setup.large_grid = std::make_shared<SimplexGrid>(
        SimplexGrid::enumerate(setup.partition->base_sets(), config.large_step_den, config.grid_cap));
  }
  EnsembleEngine engine(setup, pool);

  RunHistory h;
  for (const auto& s : strategies) h.component_names.push_back(s.name());
  for (const auto& e : config.ensembles) h.ensemble_names.push_back(e.name());
  h.grid_points = grid->size();
  if (setup.partition) {
    h.base_sets = setup.partition->base_sets();
    h.large_grid_points = setup.large_grid->size();
  }
  const std::size_t columns = k + config.ensembles.size();
  h.log_wealth.resize(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(columns));
  h.returns.resize(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(columns));
  h.allocations.assign(config.ensembles.size(), Eigen::MatrixXd(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(k)));

  std::vector<Portfolio> comps(k);
  for (std::size_t t = 0; t < periods; ++t) {
    const std::size_t n = config.burn_in + 1 + t;  // 1-based period over the return rows
    pool.parallel_for(k, [&](std::size_t begin, std::size_t end) {
      for (std::size_t a = begin; a < end; ++a) comps[a] = strategies[a].portfolio(returns, n);
    }, 1);
    const Eigen::VectorXd x = returns.returns.row(static_cast<Eigen::Index>(n - 1)).transpose();
    const PeriodRecord rec = engine.step(comps, x);

    const auto row = static_cast<Eigen::Index>(t);
    h.dates.push_back(n - 1 < returns.dates.size() ? returns.dates[n - 1] : std::to_string(n));
    for (std::size_t a = 0; a < k; ++a) {
      h.log_wealth(row, static_cast<Eigen::Index>(a)) = engine.component_ledger().log_wealth(a);
      h.returns(row, static_cast<Eigen::Index>(a)) = rec.component_returns[a];
    }
    for (std::size_t e = 0; e < config.ensembles.size(); ++e) {
      h.log_wealth(row, static_cast<Eigen::Index>(k + e)) = engine.ensemble_ledger().log_wealth(e);
      h.returns(row, static_cast<Eigen::Index>(k + e)) = rec.ensemble_returns[e];
      for (std::size_t a = 0; a < k; ++a) h.allocations[e](row, static_cast<Eigen::Index>(a)) = rec.allocations[e][a];
    }
    const auto comp_lw = engine.component_ledger().log_wealth();
    h.baseline_log.push_back(*std::max_element(comp_lw.begin(), comp_lw.end()));
    const std::size_t best = best_grid_index(engine.grid_ledger());
    h.benchmark_index.push_back(best);
    h.benchmark_log.push_back(engine.grid_ledger().log_wealth(best));
    h.best_lambda.push_back(grid->combination(best));
    if (setup.partition) {
      h.epsilon.push_back(epsilon_n(*setup.partition, engine.component_ledger()));
      const std::size_t best_large = best_grid_index(engine.large_grid_ledger());
      h.large_benchmark_index.push_back(best_large);
      h.best_large_lambda.push_back(setup.large_grid->combination(best_large));
    }
  }
  return h;
}

// ---- outputs ----------------------------------------------------------------

RunManifest write_outputs(const ExperimentConfig& config, const RunHistory& h, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  RunManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.engine_version = engine_version();
  const auto names = h.strategy_names();
  const std::size_t k = h.component_names.size();
  const std::size_t periods = h.periods();

  // wealth.csv
  {
    const fs::path path = out_dir / "wealth.csv";
    CsvWriter w(path);
    std::vector<std::string> header{"period", "date"};
    for (const auto& s : names) {
      header.push_back(s + ".log");
      header.push_back(s + ".wealth");
    }
    w.row(header);
    for (std::size_t t = 0; t < periods; ++t) {
      std::vector<std::string> fields{std::to_string(t + 1), h.dates[t]};
      for (std::size_t c = 0; c < names.size(); ++c) {
        const double lw = h.log_wealth(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
        fields.push_back(num(lw));
        fields.push_back(num(std::exp(lw)));
      }
      w.row(fields);
    }
    w.close();
    manifest.files["wealth"] = path;
  }

  // metrics.json
  {
    const fs::path path = out_dir / "metrics.json";
    json j = json::object();
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto lw = h.log_wealth_of(c);
      const auto r = h.returns_of(c);
      const MetricsReport rep = metrics(lw, r);
      json s;
      s["periods"] = rep.periods;
      s["final_wealth"] = rep.final_wealth;
      s["avg_growth_rate"] = rep.avg_growth_rate;
      s["avg_return"] = rep.avg_return;
      s["sharpe"] = rep.sharpe_infinite ? json(nullptr) : json(rep.sharpe);
      s["sharpe_infinite"] = rep.sharpe_infinite;
      j[names[c]] = s;
    }
    write_text(path, j.dump(2) + "\n");
    manifest.files["metrics"] = path;
  }

  // allocations.csv
  {
    const fs::path path = out_dir / "allocations.csv";
    CsvWriter w(path);
    std::vector<std::string> header{"period", "date"};
    for (const auto& e : h.ensemble_names) {
      for (const auto& c : h.component_names) header.push_back(e + ":" + c);
    }
    w.row(header);
    for (std::size_t t = 0; t < periods; ++t) {
      std::vector<std::string> fields{std::to_string(t + 1), h.dates[t]};
      for (const auto& alloc : h.allocations) {
        for (std::size_t a = 0; a < k; ++a) fields.push_back(num(alloc(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a))));
      }
      w.row(fields);
    }
    w.close();
    manifest.files["allocations"] = path;
  }

  // lambda_best.csv
  {
    const fs::path path = out_dir / "lambda_best.csv";
    CsvWriter w(path);
    std::vector<std::string> header{"period", "date", "grid_index", "log_wealth"};
    for (const auto& c : h.component_names) header.push_back("lambda:" + c);
    if (h.base_sets > 0) {
      header.push_back("large_grid_index");
      for (std::size_t i = 0; i < h.base_sets; ++i) header.push_back("large_lambda:set" + std::to_string(i));
    }
    w.row(header);
    for (std::size_t t = 0; t < periods; ++t) {
      std::vector<std::string> fields{std::to_string(t + 1), h.dates[t], std::to_string(h.benchmark_index[t]),
                                      num(h.benchmark_log[t])};
      for (std::size_t a = 0; a < k; ++a) fields.push_back(num(h.best_lambda[t][a]));
      if (h.base_sets > 0) {
        fields.push_back(std::to_string(h.large_benchmark_index[t]));
        for (std::size_t i = 0; i < h.base_sets; ++i) fields.push_back(num(h.best_large_lambda[t][i]));
      }
      w.row(fields);
    }
    w.close();
    manifest.files["lambda_best"] = path;
  }

  // gaps.csv: growth-rate differences W_n(a) - W_n(b)
  {
    const fs::path path = out_dir / "gaps.csv";
    CsvWriter w(path);
    std::vector<std::string> header{"period", "date", "baseline.log", "benchmark.log", "benchmark-baseline"};
    for (const auto& e : h.ensemble_names) {
      header.push_back("baseline-" + e);
      header.push_back("benchmark-" + e);
    }
    w.row(header);
    const auto bench_vs_base = growth_gap_series(h.benchmark_log, h.baseline_log).realized;
    std::vector<std::vector<double>> base_vs, bench_vs;
    for (std::size_t e = 0; e < h.ensemble_names.size(); ++e) {
      const auto lw = h.log_wealth_of(k + e);
      base_vs.push_back(growth_gap_series(h.baseline_log, lw).realized);
      bench_vs.push_back(growth_gap_series(h.benchmark_log, lw).realized);
    }
    for (std::size_t t = 0; t < periods; ++t) {
      std::vector<std::string> fields{std::to_string(t + 1), h.dates[t], num(h.baseline_log[t]),
                                      num(h.benchmark_log[t]), num(bench_vs_base[t])};
      for (std::size_t e = 0; e < h.ensemble_names.size(); ++e) {
        fields.push_back(num(base_vs[e][t]));
        fields.push_back(num(bench_vs[e][t]));
      }
      w.row(fields);
    }
    w.close();
    manifest.files["gaps"] = path;
  }

  // bounds.csv: one row per bounded strategy and period.
  {
    const fs::path path = out_dir / "bounds.csv";
    CsvWriter w(path);
    w.row({"period", "date", "strategy", "reference", "dimension", "grid_points", "epsilon", "realized_gap",
           "grid_bound", "continuous_bound", "stricter_bound"});
    std::vector<std::pair<std::size_t, StrategyBound>> bounded;
    for (std::size_t e = 0; e < h.ensemble_names.size(); ++e) {
      const auto kind = config.ensembles[e].kind;
      if (kind == EnsembleKind::UC) bounded.push_back({k + e, {h.ensemble_names[e], "benchmark", k, h.grid_points}});
      if (kind == EnsembleKind::UCLarge) {
        bounded.push_back({k + e, {h.ensemble_names[e], "baseline", h.base_sets, h.large_grid_points}});
      }
    }
    for (std::size_t t = 0; t < periods; ++t) {
      for (const auto& [column, b] : bounded) {
        const double lw = h.log_wealth(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(column));
        const bool large = b.reference == "baseline";
        const double eps = large ? h.epsilon[t] : 1.0;
        const double reference = large ? h.baseline_log[t] : h.benchmark_log[t];
        const double gb = grid_bound(b.grid_points, eps);
        const double cb = continuous_bound(b.dimension, t + 1, eps);
        w.row({std::to_string(t + 1), h.dates[t], b.strategy, b.reference, std::to_string(b.dimension),
               std::to_string(b.grid_points), num(eps), num(reference - lw), num(gb), num(cb), num(std::min(gb, cb))});
      }
    }
    w.close();
    manifest.files["bounds"] = path;
  }

  write_text(out_dir / "config.json", to_json(config));
  return manifest;
}

RunManifest run(const ExperimentConfig& config, std::size_t threads) {
  using clock = std::chrono::steady_clock;
  const auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
  config.validate();
  ThreadPool pool(threads == 0 ? threads_from_environment() : threads);

  const auto t0 = clock::now();
  const ReturnSeries returns = load_data(config);
  const auto t1 = clock::now();
  const RunHistory history = simulate(config, returns, pool);
  const auto t2 = clock::now();
  RunManifest manifest = write_outputs(config, history, config.output_dir);
  const auto t3 = clock::now();
  manifest.timings_seconds = {{"load", seconds(t1 - t0)},
                              {"simulate", seconds(t2 - t1)},
                              {"write", seconds(t3 - t2)},
                              {"total", seconds(t3 - t0)}};

  json j;
  j["config_hash"] = manifest.config_hash;
  j["engine_version"] = manifest.engine_version;
  j["threads"] = pool.size();
  for (const auto& [name, path] : manifest.files) j["files"][name] = path.string();
  for (const auto& [name, s] : manifest.timings_seconds) j["timings_seconds"][name] = s;
  write_text(config.output_dir / "manifest.json", j.dump(2) + "\n");
  return manifest;
}

// ---- post-run checks ---------------------------------------------------------

std::map<std::string, MetricsReport> metrics_from_wealth_csv(const fs::path& wealth_csv) {
  const csv::Table t = read_run_table(wealth_csv);
  std::map<std::string, MetricsReport> out;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& col = t.header[c];
    constexpr std::string_view suffix = ".log";
    if (col.size() <= suffix.size() || col.compare(col.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    std::vector<double> lw(t.rows.size());
    std::vector<double> r(t.rows.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      lw[i] = cell(t, i, c);
      r[i] = std::exp(lw[i] - prev);
      prev = lw[i];
    }
    out[col.substr(0, col.size() - suffix.size())] = metrics(lw, r);
  }
  return out;
}

GridInfo grid_info(std::size_t k, std::uint64_t step_den, std::uint64_t cap) {
  GridInfo info;
  info.k = k;
  info.step_den = step_den;
  info.points = grid_point_count(k, step_den);
  info.bytes = grid_memory_bytes(k, info.points);
  info.within_cap = info.points <= cap;
  return info;
}

BoundCheckReport bound_check(const fs::path& run_dir) {
  const fs::path wealth_path = run_dir / "wealth.csv";
  const fs::path gaps_path = run_dir / "gaps.csv";
  const fs::path bounds_path = run_dir / "bounds.csv";
  const csv::Table wealth = read_run_table(wealth_path);
  const csv::Table gaps = read_run_table(gaps_path);
  const csv::Table bounds = read_run_table(bounds_path);
  if (wealth.rows.size() != gaps.rows.size()) throw DataError("wealth.csv and gaps.csv cover different periods");

  const std::size_t g_base = column_of(gaps, "baseline.log", gaps_path);
  const std::size_t g_bench = column_of(gaps, "benchmark.log", gaps_path);
  const std::size_t c_period = column_of(bounds, "period", bounds_path);
  const std::size_t c_strategy = column_of(bounds, "strategy", bounds_path);
  const std::size_t c_reference = column_of(bounds, "reference", bounds_path);
  const std::size_t c_dim = column_of(bounds, "dimension", bounds_path);
  const std::size_t c_points = column_of(bounds, "grid_points", bounds_path);
  const std::size_t c_eps = column_of(bounds, "epsilon", bounds_path);
  const std::size_t c_gap = column_of(bounds, "realized_gap", bounds_path);
  const std::size_t c_grid = column_of(bounds, "grid_bound", bounds_path);
  const std::size_t c_cont = column_of(bounds, "continuous_bound", bounds_path);

  BoundCheckReport rep;
  auto fail = [&](std::string msg) {
    rep.passed = false;
    ++rep.violations;
    if (rep.messages.size() < 50) rep.messages.push_back(std::move(msg));
  };

  for (std::size_t i = 0; i < bounds.rows.size(); ++i) {
    const auto& row = bounds.rows[i];
    if (row.size() != bounds.header.size()) throw DataError("bounds.csv row " + std::to_string(i + 2) + " is malformed");
    const auto period = static_cast<std::size_t>(cell(bounds, i, c_period));
    if (period < 1 || period > wealth.rows.size()) throw DataError("bounds.csv refers to unknown period " + row[c_period]);
    const std::string& strategy = row[c_strategy];
    const std::string& reference = row[c_reference];
    const std::size_t t = period - 1;
    const double strategy_log = cell(wealth, t, column_of(wealth, strategy + ".log", wealth_path));
    double reference_log = 0.0;
    if (reference == "benchmark") {
      reference_log = cell(gaps, t, g_bench);
    } else if (reference == "baseline") {
      reference_log = cell(gaps, t, g_base);
    } else {
      throw DataError("bounds.csv has unknown reference '" + reference + "'");
    }
    const double gap = reference_log - strategy_log;
    const auto dim = static_cast<std::size_t>(cell(bounds, i, c_dim));
    const auto points = static_cast<std::size_t>(cell(bounds, i, c_points));
    const double eps = cell(bounds, i, c_eps);
    if (dim == 0 || points == 0 || !(eps > 0.0) || eps > 1.0) throw DataError("bounds.csv row " + std::to_string(i + 2) + " has invalid parameters");
    const double gb = grid_bound(points, eps);
    const double cb = continuous_bound(dim, period, eps);
    const std::string where = strategy + " at period " + std::to_string(period);
    ++rep.rows_checked;

    if (std::abs(gap - cell(bounds, i, c_gap)) > kConsistencyTolerance) {
      fail(where + ": recorded gap " + row[c_gap] + " disagrees with wealth files (" + num(gap) + ")");
    }
    if (std::abs(gb - cell(bounds, i, c_grid)) > kConsistencyTolerance ||
        std::abs(cb - cell(bounds, i, c_cont)) > kConsistencyTolerance) {
      fail(where + ": recorded bounds disagree with their formulas");
    }
    if (gap > gb + kBoundSlack) {
      fail(where + ": realized gap " + num(gap) + " exceeds grid bound " + num(gb));
    }
    if (gap > cb + kBoundSlack) {
      ++rep.continuous_violations;
      if (rep.messages.size() < 50) {
        rep.messages.push_back(where + ": note, realized gap " + num(gap) + " exceeds continuous bound " + num(cb));
      }
    }
  }
  return rep;
}

}  // namespace ensemblefolio
