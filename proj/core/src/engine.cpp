#include "ensemblefolio/engine.hpp"

#include <cmath>
#include <string>

#include "ensemblefolio/csv.hpp"
#include "ensemblefolio/errors.hpp"
#include "ensemblefolio/numeric.hpp"

namespace ensemblefolio {

EnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "uc") return EnsembleKind::UC;
  if (name == "wae") return EnsembleKind::WAE;
  if (name == "fl") return EnsembleKind::FL;
  if (name == "ucw") return EnsembleKind::UCW;
  if (name == "ucl") return EnsembleKind::UCL;
  if (name == "uc-large") return EnsembleKind::UCLarge;
  throw ConfigError("unknown ensemble kind '" + std::string(name) + "'");
}

std::string_view to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::UC: return "uc";
    case EnsembleKind::WAE: return "wae";
    case EnsembleKind::FL: return "fl";
    case EnsembleKind::UCW: return "ucw";
    case EnsembleKind::UCL: return "ucl";
    case EnsembleKind::UCLarge: return "uc-large";
  }
  return "?";
}

std::string EnsembleSpec::name() const {
  switch (kind) {
    case EnsembleKind::UCW: return "ucw_" + csv::format_double(support_fraction);
    case EnsembleKind::UCL: return "ucl_" + csv::format_double(support_fraction);
    case EnsembleKind::UCLarge: return "uc_large";
    default: return std::string(to_string(kind));
  }
}

EnsembleEngine::EnsembleEngine(EngineSetup setup, ThreadPool& pool) : setup_(std::move(setup)), pool_(pool) {
  if (setup_.components == 0) throw ConfigError("engine needs at least one component");
  if (setup_.assets == 0) throw ConfigError("engine needs at least one asset");
  if (!setup_.grid) throw ConfigError("engine needs a grid over the component simplex");
  if (setup_.grid->dim() != setup_.components) throw ConfigError("grid dimension does not match the component count");
  for (const auto& e : setup_.ensembles) {
    if (e.kind == EnsembleKind::UCW || e.kind == EnsembleKind::UCL) {
      if (!(e.support_fraction > 0.0) || e.support_fraction > 1.0) throw ConfigError("support fraction must lie in (0, 1]");
    }
    if (e.kind == EnsembleKind::UCLarge && (!setup_.partition || !setup_.large_grid)) {
      throw ConfigError("uc-large needs a partition and a grid over the base sets");
    }
  }
  if (setup_.partition) {
    if (setup_.partition->components() != setup_.components) throw PartitionError("partition does not cover the components");
    if (!setup_.large_grid || setup_.large_grid->dim() != setup_.partition->base_sets()) {
      throw ConfigError("large grid dimension does not match the number of base sets");
    }
  }
  components_ = WealthLedger(setup_.components);
  grid_ = WealthLedger(setup_.grid->size());
  ensembles_ = WealthLedger(setup_.ensembles.size());
  if (setup_.partition) {
    representatives_ = WealthLedger(setup_.partition->base_sets());
    large_grid_ = WealthLedger(setup_.large_grid->size());
  }
}

void EnsembleEngine::commit_grid(const SimplexGrid& grid, WealthLedger& ledger, std::span<const double> entity_returns) {
  const std::size_t k = grid.dim();
  scratch_.resize(grid.size());
  pool_.parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto lambda = grid.point(i);
      double r = 0.0;
      for (std::size_t a = 0; a < k; ++a) r += lambda[a] * entity_returns[a];
      scratch_[i] = std::log(r);
    }
  });
  ledger.update_log(scratch_);
}

PeriodRecord EnsembleEngine::step(std::span<const Portfolio> comps, const Eigen::VectorXd& x) {
  if (comps.size() != setup_.components) {
    throw ConfigError("expected " + std::to_string(setup_.components) + " component portfolios, got " +
                      std::to_string(comps.size()));
  }
  if (static_cast<std::size_t>(x.size()) != setup_.assets) throw ConfigError("return row has the wrong width");
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0) || !std::isfinite(x[j])) throw DataError("return row has a non-positive entry");
  }

  PeriodRecord rec;
  rec.component_returns.resize(setup_.components);
  for (std::size_t a = 0; a < setup_.components; ++a) rec.component_returns[a] = comps[a].weights().dot(x);

  // Representatives (within-set mixtures) for the large-scale combination.
  std::vector<std::vector<double>> inner;
  if (setup_.partition) {
    const Partition& part = *setup_.partition;
    for (std::size_t i = 0; i < part.base_sets(); ++i) {
      const auto& members = part.members(i);
      inner.push_back(representative_weights(members, part.masses(i), components_));
      Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(setup_.assets));
      for (std::size_t j = 0; j < members.size(); ++j) b += inner.back()[j] * comps[members[j]].weights();
      rec.representatives.push_back(Portfolio::normalized(std::move(b)));
    }
  }

  const bool has_history = components_.period() > 0;
  for (const auto& spec : setup_.ensembles) {
    std::vector<double> alloc;
    Portfolio b;
    switch (spec.kind) {
      case EnsembleKind::UC:
        alloc = grid_mixture_coefficients(*setup_.grid, grid_, std::nullopt, &pool_);
        b = mix_portfolios(alloc, comps);
        break;
      case EnsembleKind::UCW:
      case EnsembleKind::UCL: {
        std::optional<SupportMask> mask;
        if (has_history) {
          mask = spec.kind == EnsembleKind::UCW ? support_winners(grid_, spec.support_fraction)
                                                : support_losers(grid_, spec.support_fraction);
        }
        alloc = grid_mixture_coefficients(*setup_.grid, grid_, mask, &pool_);
        b = mix_portfolios(alloc, comps);
        break;
      }
      case EnsembleKind::WAE:
        alloc = wae_weights(components_);
        b = mix_portfolios(alloc, comps);
        break;
      case EnsembleKind::FL:
        alloc = fl_weights(components_);
        b = has_history ? comps[static_cast<std::size_t>(std::find(alloc.begin(), alloc.end(), 1.0) - alloc.begin())]
                        : mix_portfolios(alloc, comps);
        break;
      case EnsembleKind::UCLarge: {
        const Partition& part = *setup_.partition;
        const auto outer = grid_mixture_coefficients(*setup_.large_grid, large_grid_, std::nullopt, &pool_);
        b = mix_portfolios(outer, rec.representatives);
        alloc.assign(setup_.components, 0.0);
        for (std::size_t i = 0; i < part.base_sets(); ++i) {
          const auto& members = part.members(i);
          for (std::size_t j = 0; j < members.size(); ++j) alloc[members[j]] = outer[i] * inner[i][j];
        }
        const double total = numeric::pairwise_sum(alloc);
        for (double& w : alloc) w /= total;
        break;
      }
    }
    rec.ensemble_returns.push_back(b.weights().dot(x));
    rec.ensemble_portfolios.push_back(std::move(b));
    rec.allocations.push_back(std::move(alloc));
  }

  // Commit period n.
  components_.update(rec.component_returns);
  commit_grid(*setup_.grid, grid_, rec.component_returns);
  if (setup_.partition) {
    std::vector<double> rep_returns;
    rep_returns.reserve(rec.representatives.size());
    for (const auto& r : rec.representatives) rep_returns.push_back(r.weights().dot(x));
    representatives_.update(rep_returns);
    commit_grid(*setup_.large_grid, large_grid_, rep_returns);
  }
  ensembles_.update(rec.ensemble_returns);
  return rec;
}

}  // namespace ensemblefolio
