#include "ensemblefolio/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ensemblefolio/errors.hpp"
#include "ensemblefolio/numeric.hpp"

namespace ensemblefolio {
namespace {

void check_components(std::span<const Portfolio> comps) {
  if (comps.empty()) throw ConfigError("need at least one component portfolio");
  const std::size_t m = comps.front().size();
  for (const auto& b : comps) {
    if (b.size() != m) throw ConfigError("component portfolios have different dimensions");
  }
}

std::size_t support_size(std::size_t total, double p) {
  if (!(p > 0.0) || p > 1.0) throw ConfigError("support fraction must lie in (0, 1]");
  const double raw = std::ceil(p * static_cast<double>(total) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, total);
}

template <typename Before>
SupportMask select_support(const WealthLedger& ledger, double p, Before before) {
  const std::size_t total = ledger.size();
  if (total == 0) throw SupportError("cannot select a support from an empty ledger");
  const std::size_t count = support_size(total, p);
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto lw = ledger.log_wealth();
  auto order = [&](std::size_t a, std::size_t b) {
    if (lw[a] != lw[b]) return before(lw[a], lw[b]);
    return a < b;
  };
  if (count < total) {
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(), order);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
  }
  return SupportMask{std::move(idx), p};
}

}  // namespace

void WealthLedger::update(std::span<const double> gross_returns) {
  if (gross_returns.size() != log_wealth_.size()) {
    throw ConfigError("ledger tracks " + std::to_string(log_wealth_.size()) + " entities but got " +
                      std::to_string(gross_returns.size()) + " returns");
  }
  for (std::size_t i = 0; i < gross_returns.size(); ++i) {
    if (!(gross_returns[i] > 0.0) || !std::isfinite(gross_returns[i])) {
      throw DataError("non-positive gross return for ledger entity " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < gross_returns.size(); ++i) log_wealth_[i] += std::log(gross_returns[i]);
  ++period_;
}

void WealthLedger::update_log(std::span<const double> log_returns) {
  if (log_returns.size() != log_wealth_.size()) throw ConfigError("ledger size mismatch");
  for (std::size_t i = 0; i < log_returns.size(); ++i) {
    if (!std::isfinite(log_returns[i])) throw DataError("non-finite log return for ledger entity " + std::to_string(i));
  }
  for (std::size_t i = 0; i < log_returns.size(); ++i) log_wealth_[i] += log_returns[i];
  ++period_;
}

WealthLedger update_ledger(WealthLedger ledger, std::span<const double> gross_returns) {
  ledger.update(gross_returns);
  return ledger;
}

Partition::Partition(std::vector<std::vector<std::size_t>> sets, std::vector<std::vector<double>> masses,
                     std::size_t k)
    : sets_(std::move(sets)), masses_(std::move(masses)), set_of_(k, k) {
  if (k == 0) throw PartitionError("partition needs at least one component");
  if (sets_.empty()) throw PartitionError("partition needs at least one base set");
  if (masses_.size() != sets_.size()) throw PartitionError("one mass vector per base set is required");
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const auto& set = sets_[i];
    if (set.empty()) throw PartitionError("base set " + std::to_string(i) + " is empty");
    if (masses_[i].size() != set.size()) throw PartitionError("mass vector of base set " + std::to_string(i) + " has the wrong length");
    double total = 0.0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const std::size_t a = set[j];
      if (a >= k) throw PartitionError("component " + std::to_string(a) + " is out of range");
      if (set_of_[a] != k) throw PartitionError("component " + std::to_string(a) + " appears in two base sets");
      set_of_[a] = i;
      const double mu = masses_[i][j];
      if (!(mu > 0.0) || !std::isfinite(mu)) throw PartitionError("masses must be positive");
      total += mu;
    }
    if (std::abs(total - 1.0) > 1e-9) throw PartitionError("masses of base set " + std::to_string(i) + " do not sum to 1");
  }
  for (std::size_t a = 0; a < k; ++a) {
    if (set_of_[a] == k) throw PartitionError("component " + std::to_string(a) + " is not covered by any base set");
  }
}

Partition Partition::uniform(std::vector<std::vector<std::size_t>> sets, std::size_t k) {
  std::vector<std::vector<double>> masses;
  masses.reserve(sets.size());
  for (const auto& s : sets) {
    masses.emplace_back(s.size(), s.empty() ? 0.0 : 1.0 / static_cast<double>(s.size()));
  }
  return Partition(std::move(sets), std::move(masses), k);
}

Partition Partition::singletons(std::size_t k) {
  std::vector<std::vector<std::size_t>> sets(k);
  for (std::size_t a = 0; a < k; ++a) sets[a] = {a};
  return uniform(std::move(sets), k);
}

Portfolio mix_portfolios(std::span<const double> coeffs, std::span<const Portfolio> comps) {
  check_components(comps);
  if (coeffs.size() != comps.size()) {
    throw ConfigError("got " + std::to_string(coeffs.size()) + " mixing weights for " + std::to_string(comps.size()) +
                      " portfolios");
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(comps.front().size()));
  for (std::size_t a = 0; a < comps.size(); ++a) b += coeffs[a] * comps[a].weights();
  return Portfolio::normalized(std::move(b));
}

Portfolio constant_combo_portfolio(const ConstantCombination& lambda, std::span<const Portfolio> comps) {
  const Eigen::VectorXd& w = lambda.weights();
  return mix_portfolios(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), comps);
}

std::vector<double> grid_mixture_coefficients(const SimplexGrid& grid, const WealthLedger& grid_ledger,
                                              const std::optional<SupportMask>& mask, ThreadPool* pool) {
  const std::size_t total = grid.size();
  if (grid_ledger.size() != total) {
    throw ConfigError("grid ledger tracks " + std::to_string(grid_ledger.size()) + " points but the grid has " +
                      std::to_string(total));
  }
  const std::size_t* idx = nullptr;
  std::size_t count = total;
  if (mask) {
    if (mask->included.empty()) throw SupportError("mixture support is empty");
    for (std::size_t i : mask->included) {
      if (i >= total) throw SupportError("support index " + std::to_string(i) + " is outside the grid");
    }
    idx = mask->included.data();
    count = mask->included.size();
  }
  if (count == 0) throw SupportError("mixture support is empty");
  auto at = [idx](std::size_t i) { return idx ? idx[i] : i; };

  const auto lw = grid_ledger.log_wealth();
  double hi = lw[at(0)];
  for (std::size_t i = 1; i < count; ++i) hi = std::max(hi, lw[at(i)]);

  auto run = [pool](std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (pool) {
      pool->parallel_for(n, body);
    } else {
      body(0, n);
    }
  };

  std::vector<double> expw(count);
  run(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) expw[i] = std::exp(lw[at(i)] - hi);
  });
  const double norm = numeric::pairwise_sum(expw);

  const std::size_t k = grid.dim();
  std::vector<double> coeffs(k);
  std::vector<double> terms(count);
  for (std::size_t a = 0; a < k; ++a) {
    run(count, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) terms[i] = expw[i] * grid.point(at(i))[a];
    });
    coeffs[a] = numeric::pairwise_sum(terms) / norm;
  }
  return coeffs;
}

Portfolio uc_portfolio(const SimplexGrid& grid, const WealthLedger& grid_ledger, std::span<const Portfolio> comps,
                       const std::optional<SupportMask>& mask) {
  check_components(comps);
  if (grid.dim() != comps.size()) {
    throw ConfigError("grid dimension " + std::to_string(grid.dim()) + " does not match " +
                      std::to_string(comps.size()) + " components");
  }
  const auto coeffs = grid_mixture_coefficients(grid, grid_ledger, mask);
  return mix_portfolios(coeffs, comps);
}

SupportMask support_winners(const WealthLedger& grid_ledger, double p) {
  return select_support(grid_ledger, p, [](double a, double b) { return a > b; });
}

SupportMask support_losers(const WealthLedger& grid_ledger, double p) {
  return select_support(grid_ledger, p, [](double a, double b) { return a < b; });
}

std::vector<double> representative_weights(std::span<const std::size_t> members, std::span<const double> masses,
                                           const WealthLedger& comp_ledger) {
  if (members.empty()) throw PartitionError("base set is empty");
  if (masses.size() != members.size()) throw PartitionError("mass vector does not match base set");
  for (std::size_t a : members) {
    if (a >= comp_ledger.size()) throw PartitionError("base set member " + std::to_string(a) + " is not tracked");
  }
  if (comp_ledger.period() == 0) return {masses.begin(), masses.end()};
  std::vector<double> logw(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (!(masses[j] > 0.0)) throw PartitionError("masses must be positive");
    logw[j] = comp_ledger.log_wealth(members[j]) + std::log(masses[j]);
  }
  return numeric::softmax(logw);
}

Portfolio representative_portfolio(std::span<const std::size_t> members, std::span<const double> masses,
                                   const WealthLedger& comp_ledger, std::span<const Portfolio> comps) {
  check_components(comps);
  const auto w = representative_weights(members, masses, comp_ledger);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(comps.front().size()));
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (members[j] >= comps.size()) throw PartitionError("base set member has no portfolio");
    b += w[j] * comps[members[j]].weights();
  }
  return Portfolio::normalized(std::move(b));
}

Portfolio uc_large_portfolio(const SimplexGrid& grid, const WealthLedger& grid_ledger,
                             std::span<const Portfolio> reps, const std::optional<SupportMask>& mask) {
  return uc_portfolio(grid, grid_ledger, reps, mask);
}

AllocationDistribution allocation_distribution(const SimplexGrid& grid, const WealthLedger& grid_ledger,
                                               const WealthLedger& comp_ledger, const Partition& partition) {
  if (grid.dim() != partition.base_sets()) throw ConfigError("grid dimension does not match the number of base sets");
  if (comp_ledger.size() != partition.components()) throw ConfigError("component ledger does not match the partition");
  const auto outer = grid_mixture_coefficients(grid, grid_ledger);
  AllocationDistribution p;
  p.weights.assign(partition.components(), 0.0);
  for (std::size_t i = 0; i < partition.base_sets(); ++i) {
    const auto& members = partition.members(i);
    const auto inner = representative_weights(members, partition.masses(i), comp_ledger);
    for (std::size_t j = 0; j < members.size(); ++j) p.weights[members[j]] = outer[i] * inner[j];
  }
  const double total = numeric::pairwise_sum(p.weights);
  for (double& w : p.weights) w /= total;
  return p;
}

std::vector<double> wae_weights(const WealthLedger& comp_ledger) {
  if (comp_ledger.size() == 0) throw ConfigError("need at least one component");
  return numeric::softmax(comp_ledger.log_wealth());
}

Portfolio wae_portfolio(const WealthLedger& comp_ledger, std::span<const Portfolio> comps) {
  if (comp_ledger.size() != comps.size()) throw ConfigError("ledger does not match the components");
  return mix_portfolios(wae_weights(comp_ledger), comps);
}

std::vector<double> fl_weights(const WealthLedger& comp_ledger) {
  const std::size_t k = comp_ledger.size();
  if (k == 0) throw ConfigError("need at least one component");
  if (comp_ledger.period() == 0) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  const auto lw = comp_ledger.log_wealth();
  const auto leader = static_cast<std::size_t>(std::max_element(lw.begin(), lw.end()) - lw.begin());
  std::vector<double> w(k, 0.0);
  w[leader] = 1.0;
  return w;
}

Portfolio fl_portfolio(const WealthLedger& comp_ledger, std::span<const Portfolio> comps) {
  if (comp_ledger.size() != comps.size()) throw ConfigError("ledger does not match the components");
  const auto w = fl_weights(comp_ledger);
  if (comp_ledger.period() == 0) return mix_portfolios(w, comps);
  const auto leader = static_cast<std::size_t>(std::find(w.begin(), w.end(), 1.0) - w.begin());
  return comps[leader];
}

}  // namespace ensemblefolio
