// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [--criterion N] [--cli path/to/ensemblefolio]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ensemblefolio/analysis.hpp"
#include "ensemblefolio/csv.hpp"
#include "ensemblefolio/engine.hpp"
#include "ensemblefolio/experiment.hpp"
#include "ensemblefolio/strategies.hpp"
#include "json.hpp"
#include "support.hpp"

namespace ef = ensemblefolio;
namespace fs = std::filesystem;
using testsupport::GridWealthOracle;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

std::string g_cli = "ensemblefolio";

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ensemblefolio_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---- 1 and 2: telescoping and finite-mixture regret ------------------------

struct MixtureStats {
  double worst_relative = 0.0;       // |S(UC) - grid mean| / S(UC)
  double worst_regret_margin = -1e300;  // (log bench - log uc) - log|grid|
  double seconds = 0.0;
};

const MixtureStats& mixture_stats() {
  static const MixtureStats stats = [] {
    MixtureStats s;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> pick_m(2, 6), pick_k(2, 4);
    ef::ThreadPool pool(1);
    for (int inst = 0; inst < 50; ++inst) {
      const std::size_t m = pick_m(rng), k = pick_k(rng), T = 500;
      const std::uint64_t den = k == 2 ? 200 : k == 3 ? 20 : 10;
      auto grid = std::make_shared<ef::SimplexGrid>(ef::SimplexGrid::enumerate(k, den));
      ef::EnsembleEngine engine({k, m, {{ef::EnsembleKind::UC, 1.0}}, grid, std::nullopt, nullptr}, pool);
      GridWealthOracle oracle(*grid);
      const double log_g = std::log(static_cast<double>(grid->size()));
      const auto comps = testsupport::random_components(rng, T, k, m);
      for (std::size_t t = 0; t < T; ++t) {
        const auto x = testsupport::random_row(rng, m, 0.85, 1.15);
        engine.step(comps[t], x);
        oracle.step(comps[t], x);
        const double log_uc = engine.ensemble_ledger().log_wealth(0);
        const long double uc = std::exp(static_cast<long double>(log_uc));
        s.worst_relative = std::max(s.worst_relative, static_cast<double>(std::fabs((uc - oracle.mean()) / uc)));
        const double log_bench = engine.grid_ledger().log_wealth(ef::best_grid_index(engine.grid_ledger()));
        const double oracle_bench = static_cast<double>(std::log(oracle.max()));
        s.worst_regret_margin = std::max({s.worst_regret_margin, log_bench - log_uc - log_g, oracle_bench - log_uc - log_g});
      }
    }
    s.seconds = seconds_since(t0);
    return s;
  }();
  return stats;
}

Outcome criterion_1() {
  const auto& s = mixture_stats();
  Outcome o;
  o.require(s.worst_relative <= 1e-10, "relative telescoping error " + fmt(s.worst_relative));
  o.require(s.seconds <= 60.0, "took " + fmt(s.seconds) + " s");
  if (o.pass) o.detail = "max relative error " + fmt(s.worst_relative) + ", " + fmt(s.seconds) + " s";
  return o;
}

Outcome criterion_2() {
  const auto& s = mixture_stats();
  Outcome o;
  o.require(s.worst_regret_margin <= 1e-12, "regret exceeds log|grid| by " + fmt(s.worst_regret_margin));
  if (o.pass) o.detail = "max (regret - log|grid|) " + fmt(s.worst_regret_margin);
  return o;
}

// ---- 3: large-scale bound --------------------------------------------------

Outcome criterion_3() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  const std::size_t k = 12, m = 5, T = 1000;
  double worst_margin = -1e300;
  ef::ThreadPool pool(1);
  for (std::size_t N : {2u, 3u, 4u}) {
    const std::uint64_t den = N == 2 ? 100 : N == 3 ? 50 : 20;
    for (int inst = 0; inst < 2; ++inst) {
      // Random partition of the 12 components into N non-empty sets.
      std::vector<std::size_t> order(k);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::vector<std::size_t>> sets(N);
      for (std::size_t i = 0; i < k; ++i) sets[i < N ? i : rng() % N].push_back(order[i]);
      const auto part = ef::Partition::uniform(sets, k);
      std::size_t largest = 0;
      for (const auto& s : sets) largest = std::max(largest, s.size());

      // Persistent component portfolios on assets with different drifts.
      std::vector<ef::Portfolio> comps;
      for (std::size_t a = 0; a < k; ++a) comps.push_back(testsupport::random_portfolio(rng, m));
      Eigen::VectorXd drift(static_cast<Eigen::Index>(m));
      for (auto& d : drift) d = std::uniform_real_distribution<double>(-0.01, 0.01)(rng);

      auto grid = std::make_shared<ef::SimplexGrid>(ef::SimplexGrid::enumerate(k, 1));
      auto large = std::make_shared<ef::SimplexGrid>(ef::SimplexGrid::enumerate(N, den));
      ef::EnsembleEngine engine({k, m, {{ef::EnsembleKind::UCLarge, 1.0}}, grid, part, large}, pool);
      std::vector<long double> comp_wealth(k, 1.0L);
      for (std::size_t t = 0; t < T; ++t) {
        const Eigen::VectorXd x = (testsupport::random_row(rng, m, 0.9, 1.1).array() * (1.0 + drift.array())).matrix();
        engine.step(comps, x);
        for (std::size_t a = 0; a < k; ++a) comp_wealth[a] *= comps[a].weights().dot(x);
        const double baseline = static_cast<double>(std::log(*std::max_element(comp_wealth.begin(), comp_wealth.end())));
        const double eps = ef::epsilon_n(part, engine.component_ledger());
        // Uniform masses: every member of set i carries 1/|set i|.
        o.require(std::abs(eps - 1.0 / static_cast<double>(largest)) <= 1e-15, "epsilon_n disagrees with 1/max|set|");
        const std::size_t n = t + 1;
        const double gap = baseline - engine.ensemble_ledger().log_wealth(0);
        const double bound = static_cast<double>(N - 1) * std::log(static_cast<double>(n + 1)) - std::log(eps);
        worst_margin = std::max(worst_margin, gap - bound);
        if (gap > bound) {
          o.require(false, "N=" + std::to_string(N) + " n=" + std::to_string(n) + " gap " + fmt(gap) + " > " + fmt(bound));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs <= 120.0, "took " + fmt(secs) + " s");
  if (o.pass) o.detail = "max (gap - bound) " + fmt(worst_margin) + ", " + fmt(secs) + " s";
  return o;
}

// ---- 4: dominance reduction ------------------------------------------------

Outcome criterion_4() {
  Outcome o;
  std::mt19937_64 rng(4242);
  const std::uint64_t den = 20;
  const std::size_t T = 200;
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const std::size_t h = inst < 5 ? 1 : 2;
    const std::size_t k = h == 1 ? 3 + inst % 2 : 4 + inst % 2;
    // Base set i gets components with i == a % h; its dominating member is chosen at random.
    std::vector<std::vector<std::size_t>> sets(h);
    for (std::size_t a = 0; a < k; ++a) sets[a % h].push_back(a);
    std::vector<std::size_t> dominating;
    for (const auto& s : sets) dominating.push_back(s[rng() % s.size()]);
    Eigen::MatrixXd r(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(k));
    std::uniform_real_distribution<double> lead(0.9, 1.12), shrink(0.85, 0.995);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t i = 0; i < h; ++i) {
        const double top = lead(rng);
        for (std::size_t a : sets[i]) {
          r(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a)) = a == dominating[i] ? top : top * shrink(rng);
        }
      }
    }
    const auto part = ef::Partition::uniform(sets, k);
    const auto rep = ef::dominance_reduction_check(r, part, den, 1e-9);
    const std::string tag = "instance " + std::to_string(inst) + ": ";
    o.require(rep.precondition_met, tag + "precondition not detected");
    o.require(rep.dominating == dominating, tag + "wrong dominating members");
    o.require(rep.equal.value_or(false), tag + "reduced and full grids disagree");
    o.require(rep.max_relative_gap <= 1e-9, tag + "relative gap " + fmt(rep.max_relative_gap));
    o.require(rep.argmax_on_dominating, tag + "best combination leaves the dominating members");
    worst = std::max(worst, rep.max_relative_gap);

    // Independent brute force over both grids at the final period.
    const auto full = ef::SimplexGrid::enumerate(k, den);
    long double best_full = 0.0L;
    std::size_t best_idx = 0;
    for (std::size_t p = 0; p < full.size(); ++p) {
      long double w = 1.0L;
      for (std::size_t t = 0; t < T; ++t) {
        long double ret = 0.0L;
        for (std::size_t a = 0; a < k; ++a) ret += full.point(p)[a] * r(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(a));
        w *= ret;
      }
      if (w > best_full) {
        best_full = w;
        best_idx = p;
      }
    }
    const auto reduced = ef::SimplexGrid::enumerate(h, den);
    long double best_reduced = 0.0L;
    for (std::size_t p = 0; p < reduced.size(); ++p) {
      long double w = 1.0L;
      for (std::size_t t = 0; t < T; ++t) {
        long double ret = 0.0L;
        for (std::size_t j = 0; j < h; ++j) {
          ret += reduced.point(p)[j] * r(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(dominating[j]));
        }
        w *= ret;
      }
      best_reduced = std::max(best_reduced, w);
    }
    o.require(std::fabs(static_cast<double>(best_full / best_reduced - 1.0L)) <= 1e-9, tag + "oracle grids disagree");
    for (std::size_t a = 0; a < k; ++a) {
      const bool dom = std::find(dominating.begin(), dominating.end(), a) != dominating.end();
      o.require(dom || full.point(best_idx)[a] == 0.0, tag + "oracle best leaves the dominating members");
      o.require(dom || (rep.final_best && (*rep.final_best)[a] == 0.0), tag + "final best leaves the dominating members");
    }
  }
  if (o.pass) o.detail = "10 instances, max relative gap " + fmt(worst);
  return o;
}

// ---- 5: M-V solver -----------------------------------------------------------

// Minimum of b'Sb - alpha mu'b over the grid with step 1/den. All but the last
// two coordinates are enumerated; along the last edge the objective is a convex
// quadratic in the integer t, so checking the endpoints and the two integers
// around the continuous minimizer is exact.
double mv_grid_minimum(const Eigen::VectorXd& mu, const Eigen::MatrixXd& S, double alpha, int den) {
  const Eigen::Index m = mu.size();
  const auto g = [&](const Eigen::VectorXd& b) { return b.dot(S * b) - alpha * mu.dot(b); };
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  u[m - 2] = 1.0;
  u[m - 1] = -1.0;
  const double uSu = u.dot(S * u);
  double best = 1e300;
  std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index j, int remaining) {
    if (j == m - 2) {
      b[m - 2] = 0.0;
      b[m - 1] = static_cast<double>(remaining) / den;
      const double slope = 2.0 * b.dot(S * u) - alpha * mu.dot(u);
      std::vector<double> cands{0.0, static_cast<double>(remaining)};
      if (uSu > 0.0) {
        const double ts = std::clamp(-slope * den / (2.0 * uSu), 0.0, static_cast<double>(remaining));
        cands.push_back(std::floor(ts));
        cands.push_back(std::ceil(ts));
      }
      for (double t : cands) {
        b[m - 2] = t / den;
        b[m - 1] = (remaining - t) / den;
        best = std::min(best, g(b));
      }
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      b[j] = static_cast<double>(c) / den;
      rec(j + 1, remaining - c);
    }
    b[j] = 0.0;
  };
  rec(0, den);
  return best;
}

Outcome criterion_5() {
  Outcome o;
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> mu_d(0.9, 1.1), f_d(-1.0, 1.0), alpha_d(0.0, 10.0);
  double worst = -1e300;
  for (int inst = 0; inst < 100; ++inst) {
    const Eigen::Index m = 2 + inst % 3;
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(m));
    ef::RollingEstimates est;
    est.window = 20;
    est.mean.resize(m);
    for (auto& v : est.mean) v = mu_d(rng);
    Eigen::MatrixXd f(m, rank);
    for (auto& v : f.reshaped()) v = f_d(rng);
    const double scale = std::pow(10.0, -static_cast<double>(rng() % 4));
    est.cov = f * f.transpose() * scale;
    const double alpha = inst % 10 == 0 ? 0.0 : alpha_d(rng) * scale;
    const auto sol = ef::mv_solve(est, alpha);
    const double oracle = -mv_grid_minimum(est.mean, est.cov, alpha, 1000);
    const double shortfall = oracle - sol.objective;
    worst = std::max(worst, shortfall);
    o.require(sol.objective >= oracle - 1e-6, "instance " + std::to_string(inst) + " short by " + fmt(shortfall));
    o.require(sol.portfolio.weights().minCoeff() >= 0.0 && std::abs(sol.portfolio.weights().sum() - 1.0) <= 1e-12,
              "instance " + std::to_string(inst) + " left the simplex");
  }
  const ef::RollingEstimates hand{Eigen::Vector2d(1.1, 1.0), Eigen::Matrix2d::Identity(), 20};
  const auto b = ef::mv_solve(hand, 4.0).portfolio;
  o.require(std::abs(b[0] - 0.6) <= 1e-6 && std::abs(b[1] - 0.4) <= 1e-6,
            "hand instance gave (" + fmt(b[0]) + ", " + fmt(b[1]) + ")");
  if (o.pass) o.detail = "max shortfall vs grid " + fmt(worst) + ", hand instance ok";
  return o;
}

// ---- 6 and 7: full run through the CLI --------------------------------------

fs::path write_experiment_config(const fs::path& dir) {
  const fs::path cfg = dir / "full_run.json";
  std::ofstream out(cfg);
  out << R"({
  "data": {"source": "synth", "assets": 6, "periods": 6798, "regime": "regime-switching"},
  "window": 20,
  "burn_in": 20,
  "alphas": [0.005, 1],
  "ensembles": ["uc", "wae", "fl", "ucw", "ucl"],
  "support_fractions": {"ucw": [0.3, 0.5], "ucl": [0.3, 0.5]},
  "grid": {"step_den": 2000},
  "seed": 1993
})";
  return cfg;
}

int run_cli(const fs::path& cfg, const fs::path& out, int threads) {
  return shell("ENSEMBLEFOLIO_THREADS=" + std::to_string(threads) + " " + g_cli + " run --config " + cfg.string() +
               " --out " + out.string());
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

Outcome criterion_6() {
  Outcome o;
  const fs::path dir = workdir("full_run");
  const fs::path cfg = write_experiment_config(dir);
  const fs::path out = dir / "out";
  const auto t0 = Clock::now();
  const int code = run_cli(cfg, out, 8);
  const double secs = seconds_since(t0);
  o.require(code == 0, "run exited with " + std::to_string(code));
  o.require(secs <= 60.0, "run took " + fmt(secs) + " s");
  if (!o.pass) return o;

  const std::vector<std::string> files{"wealth.csv", "metrics.json", "allocations.csv",
                                       "lambda_best.csv", "gaps.csv", "bounds.csv"};
  for (const auto& f : files) o.require(fs::exists(out / f), "missing " + f);
  if (!o.pass) return o;

  const auto wealth = ef::csv::read_table(out / "wealth.csv");
  o.require(wealth.rows.size() == 6778, "wealth.csv has " + std::to_string(wealth.rows.size()) + " periods");
  const auto lam = ef::csv::read_table(out / "lambda_best.csv");
  o.require(lam.rows.size() == 6778, "lambda_best.csv has the wrong length");
  const auto idx = lam.column("grid_index");
  for (const auto& row : lam.rows) o.require(std::stoul(row[idx]) < 2001, "grid index out of range");
  const auto bounds = ef::csv::read_table(out / "bounds.csv");
  o.require(bounds.rows.front()[bounds.column("grid_points")] == "2001", "grid does not have 2001 points");

  // metrics.json agrees with metrics recomputed from wealth.csv.
  const auto metrics = nlohmann::json::parse(slurp(out / "metrics.json"));
  const auto recomputed = ef::metrics_from_wealth_csv(out / "wealth.csv");
  o.require(metrics.size() == recomputed.size() && metrics.size() == 9, "metrics.json lists the wrong strategies");
  for (const auto& [name, m] : recomputed) {
    const auto& j = metrics.at(name);
    o.require(close_rel(j.at("final_wealth").get<double>(), m.final_wealth, 1e-9), name + " final wealth round-trip");
    o.require(close_rel(j.at("avg_growth_rate").get<double>(), m.avg_growth_rate, 1e-9), name + " growth round-trip");
    o.require(close_rel(j.at("avg_return").get<double>(), m.avg_return, 1e-9), name + " return round-trip");
    o.require(!j.at("sharpe").is_null() && close_rel(j.at("sharpe").get<double>(), m.sharpe, 1e-9),
              name + " sharpe round-trip");
  }

  // Allocations are distributions for every ensemble and period.
  const auto alloc = ef::csv::read_table(out / "allocations.csv");
  for (const auto& row : alloc.rows) {
    for (std::size_t c = 2; c + 1 < row.size(); c += 2) {
      const double s = ef::csv::parse_double(row[c]) + ef::csv::parse_double(row[c + 1]);
      if (std::abs(s - 1.0) > 1e-12) {
        o.require(false, "allocation row does not sum to 1");
        break;
      }
    }
  }

  // Config and bounds round-trips.
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  o.require(ef::config_hash(ef::load_config(out / "config.json")) == manifest.at("config_hash").get<std::string>(),
            "config.json does not reproduce the config hash");
  o.require(shell(g_cli + " bound-check --run " + out.string()) == 0, "bound-check failed");
  o.require(shell(g_cli + " grid --k 2 --step-den 2000") == 0, "grid command failed");
  if (o.pass) o.detail = "6778 periods, 2001 grid points, run " + fmt(secs) + " s";
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const fs::path dir = workdir("determinism");
  const fs::path cfg = write_experiment_config(dir);
  o.require(run_cli(cfg, dir / "t1", 1) == 0, "single-thread run failed");
  o.require(run_cli(cfg, dir / "t8", 8) == 0, "eight-thread run failed");
  if (!o.pass) return o;
  const std::string a = slurp(dir / "t1" / "wealth.csv");
  const std::string b = slurp(dir / "t8" / "wealth.csv");
  o.require(!a.empty() && a == b, "wealth.csv differs between 1 and 8 threads");
  if (o.pass) o.detail = std::to_string(a.size()) + " identical bytes";
  return o;
}

// ---- 8: follow the leader -----------------------------------------------------

Outcome criterion_8() {
  Outcome o;
  const std::size_t k = 3, T = 2000;
  std::mt19937_64 rng(8);
  std::vector<ef::Portfolio> comps;
  for (std::size_t a = 0; a < k; ++a) comps.push_back(ef::Portfolio::vertex(k, a));
  auto grid = std::make_shared<ef::SimplexGrid>(ef::SimplexGrid::enumerate(k, 4));
  ef::ThreadPool pool(1);
  ef::EnsembleEngine engine({k, k, {{ef::EnsembleKind::FL, 1.0}}, grid, std::nullopt, nullptr}, pool);
  std::vector<long double> comp_log(k, 0.0L);
  std::vector<double> scaled_gap(T + 1, 0.0);  // n * |W_n(baseline) - W_n(FL)|
  for (std::size_t n = 1; n <= T; ++n) {
    Eigen::VectorXd x = testsupport::random_row(rng, k, 0.95, 1.05);
    if (n < 100) {
      x[0] *= 1.004;  // an early leader that fades
    } else {
      x[2] = std::max(x[0], x[1]) * 1.01;  // component 2 dominates from period 100 on
    }
    engine.step(comps, x);
    for (std::size_t a = 0; a < k; ++a) comp_log[a] += std::log(static_cast<long double>(x[static_cast<Eigen::Index>(a)]));
    const double baseline = static_cast<double>(*std::max_element(comp_log.begin(), comp_log.end()));
    scaled_gap[n] = std::abs(baseline - engine.ensemble_ledger().log_wealth(0));
  }
  const double C = scaled_gap[200];
  double worst = 0.0;
  for (std::size_t n = 200; n <= T; ++n) worst = std::max(worst, scaled_gap[n] - C);
  o.require(C > 0.0, "baseline and FL coincide, nothing to test");
  o.require(worst <= 1e-9, "n |W_n(baseline) - W_n(FL)| exceeds C by " + fmt(worst));
  if (o.pass) o.detail = "C = " + fmt(C) + ", max excess " + fmt(worst);
  return o;
}

// ---- 9: UC-W / UC-L ----------------------------------------------------------

Outcome criterion_9() {
  Outcome o;
  const std::size_t k = 3, m = 4, T = 2000;
  std::mt19937_64 rng(99);
  auto grid = std::make_shared<ef::SimplexGrid>(ef::SimplexGrid::enumerate(k, 20));
  ef::ThreadPool pool(2);
  const std::vector<ef::EnsembleSpec> specs{
      {ef::EnsembleKind::UC, 1.0},   {ef::EnsembleKind::UCW, 1.0}, {ef::EnsembleKind::UCL, 1.0},
      {ef::EnsembleKind::UCW, 0.3},  {ef::EnsembleKind::UCL, 0.3}, {ef::EnsembleKind::UCW, 0.001},
      {ef::EnsembleKind::UCL, 0.5}};
  ef::EnsembleEngine engine({k, m, specs, grid, std::nullopt, nullptr}, pool);
  double worst_same = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t e = 3; e < specs.size(); ++e) {
      const double p = specs[e].support_fraction;
      const auto mask = specs[e].kind == ef::EnsembleKind::UCW ? ef::support_winners(engine.grid_ledger(), p)
                                                               : ef::support_losers(engine.grid_ledger(), p);
      o.require(!mask.included.empty(), "empty support at period " + std::to_string(t + 1));
    }
    const auto rec = engine.step(testsupport::random_components(rng, 1, k, m)[0], testsupport::random_row(rng, m, 0.8, 1.2));
    for (const auto& b : rec.ensemble_portfolios) {
      const auto& w = b.weights();
      o.require(w.allFinite() && w.minCoeff() >= 0.0 && std::abs(w.sum() - 1.0) <= 1e-12,
                "portfolio off the simplex at period " + std::to_string(t + 1));
    }
    const auto& l = engine.ensemble_ledger();
    worst_same = std::max({worst_same, std::abs(l.log_wealth(1) - l.log_wealth(0)), std::abs(l.log_wealth(2) - l.log_wealth(0))});
  }
  o.require(worst_same <= 1e-12, "p = 1 differs from UC by " + fmt(worst_same));
  if (o.pass) o.detail = "p = 1 max difference " + fmt(worst_same) + ", " + std::to_string(T) + " periods";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) only = std::stoi(argv[++i]);
    else if (a == "--cli" && i + 1 < argc) g_cli = argv[++i];
    else {
      std::cerr << "usage: acceptance [--criterion N] [--cli path]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"telescoping identity", criterion_1},
      {"finite-mixture regret", criterion_2},
      {"large-scale regret bound", criterion_3},
      {"dominance reduction", criterion_4},
      {"mean-variance solver", criterion_5},
      {"full-scale run", criterion_6},
      {"thread-count determinism", criterion_7},
      {"follow-the-leader convergence", criterion_8},
      {"winners/losers consistency", criterion_9},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    all = all && out.pass;
    std::cout << "criterion " << i + 1 << ": " << (out.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
              << " (" << out.detail << ")" << std::endl;
  }
  return all ? 0 : 1;
}
