#include <benchmark/benchmark.h>

#include <random>

#include "ensemblefolio/engine.hpp"
#include "ensemblefolio/simplex_grid.hpp"
#include "ensemblefolio/strategies.hpp"

namespace ef = ensemblefolio;

static void BM_GridEnumerate(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::uint64_t>(state.range(1));
  for (auto _ : state) {
    auto g = ef::SimplexGrid::enumerate(k, d);
    benchmark::DoNotOptimize(g.coordinates().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ef::grid_point_count(k, d)));
}
BENCHMARK(BM_GridEnumerate)->Args({2, 2000})->Args({3, 200})->Args({4, 60});

static void BM_UcStep(benchmark::State& state) {
  const std::size_t k = 3, m = 6;
  const auto threads = static_cast<std::size_t>(state.range(1));
  auto grid = std::make_shared<ef::SimplexGrid>(ef::SimplexGrid::enumerate(k, static_cast<std::uint64_t>(state.range(0))));
  ef::ThreadPool pool(threads);
  ef::EnsembleEngine engine({k, m, {{ef::EnsembleKind::UC, 1.0}}, grid, std::nullopt, nullptr}, pool);
  std::vector<ef::Portfolio> comps{ef::Portfolio::uniform(m), ef::Portfolio::vertex(m, 0), ef::Portfolio::vertex(m, 5)};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.95, 1.05);
  Eigen::VectorXd x(static_cast<Eigen::Index>(m));
  for (auto _ : state) {
    for (auto& v : x) v = u(rng);
    benchmark::DoNotOptimize(engine.step(comps, x));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid->size()));
}
BENCHMARK(BM_UcStep)->Args({200, 1})->Args({200, 4})->Args({600, 1})->Args({600, 4});

static void BM_MeanVarianceSolve(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.01);
  Eigen::MatrixXd rows(20, m);
  for (auto& v : rows.reshaped()) v = 1.0 + g(rng);
  ef::ReturnSeries r;
  r.returns = rows;
  for (Eigen::Index j = 0; j < m; ++j) r.symbols.push_back("S" + std::to_string(j));
  const auto est = ef::rolling_estimates(r, 21, 20);
  for (auto _ : state) benchmark::DoNotOptimize(ef::mv_solve(est, 0.5));
}
BENCHMARK(BM_MeanVarianceSolve)->Arg(2)->Arg(6)->Arg(20);
BENCHMARK_MAIN();
