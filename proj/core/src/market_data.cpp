#include "ensemblefolio/market_data.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "ensemblefolio/csv.hpp"
#include "ensemblefolio/errors.hpp"

namespace ensemblefolio {
namespace {

struct RawTable {
  std::vector<std::string> dates;
  std::vector<std::string> symbols;
  Eigen::MatrixXd values;
};

// Shared reader for the price and return layouts. `what` names the cell kind
// in error messages.
RawTable parse_table(std::istream& in, std::string_view source, std::string_view what) {
  const std::string src(source);
  std::vector<std::string> header;
  if (!csv::read_record(in, header)) throw DataError(src + ": empty file");
  if (header.empty() || header[0] != "date") {
    throw DataError(src + ": first header column must be 'date'");
  }
  if (header.size() < 3) throw DataError(src + ": need at least two symbol columns");

  RawTable t;
  t.symbols.assign(header.begin() + 1, header.end());
  const std::size_t m = t.symbols.size();

  struct Row {
    std::size_t line;
    std::string date;
    std::vector<double> cells;
  };
  std::vector<Row> rows;
  std::vector<std::string> fields;
  std::size_t line = 1;
  while (csv::read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;
    const std::string where = src + ": row " + std::to_string(line);
    if (fields.size() != m + 1) {
      throw DataError(where + ": expected " + std::to_string(m + 1) + " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw DataError(where + ": missing date");
    Row row{line, fields[0], std::vector<double>(m)};
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      try {
        v = csv::parse_double(fields[j + 1]);
      } catch (const std::invalid_argument&) {
        throw DataError(where + ": malformed " + std::string(what) + " in column '" + t.symbols[j] + "'");
      }
      if (!std::isfinite(v) || v <= 0.0) {
        throw DataError(where + ": non-positive " + std::string(what) + " in column '" + t.symbols[j] + "'");
      }
      row.cells[j] = v;
    }
    rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw DataError(src + ": row " + std::to_string(rows[i].line) + ": duplicate date '" + rows[i].date + "'");
    }
  }

  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  t.dates.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.dates.push_back(rows[i].date);
    for (std::size_t j = 0; j < m; ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].cells[j];
    }
  }
  return t;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

// ISO-8601 label for day offset `n` from 1993-01-01.
std::string synthetic_date(std::size_t n) {
  using namespace std::chrono;
  const sys_days day = sys_days{year{1993} / January / 1} + days{static_cast<long>(n)};
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace

void validate(const ReturnSeries& r) {
  if (r.assets() < 2) throw DataError("return series needs at least two assets");
  if (r.symbols.size() != r.assets()) throw DataError("symbol count does not match return columns");
  if (!r.dates.empty() && r.dates.size() != r.periods()) throw DataError("date count does not match return rows");
  for (Eigen::Index n = 0; n < r.returns.rows(); ++n) {
    for (Eigen::Index j = 0; j < r.returns.cols(); ++j) {
      const double v = r.returns(n, j);
      if (!std::isfinite(v) || v <= 0.0) {
        throw DataError("return at period " + std::to_string(n) + ", asset " + std::to_string(j) + " is not positive");
      }
    }
  }
}

PriceSeries parse_prices(std::istream& in, std::string_view source) {
  RawTable t = parse_table(in, source, "price");
  return PriceSeries{std::move(t.dates), std::move(t.symbols), std::move(t.values)};
}

PriceSeries load_prices(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_prices(in, path.string());
}

ReturnSeries parse_returns(std::istream& in, std::string_view source) {
  RawTable t = parse_table(in, source, "return");
  return ReturnSeries{std::move(t.dates), std::move(t.symbols), std::move(t.values)};
}

ReturnSeries load_returns(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_returns(in, path.string());
}

ReturnSeries prices_to_returns(const PriceSeries& p) {
  if (p.periods() < 2) throw InsufficientDataError("need at least two price rows to form returns");
  const Eigen::Index rows = p.prices.rows() - 1;
  ReturnSeries r;
  r.symbols = p.symbols;
  r.returns = p.prices.bottomRows(rows).cwiseQuotient(p.prices.topRows(rows));
  if (p.dates.size() == p.periods()) r.dates.assign(p.dates.begin() + 1, p.dates.end());
  return r;
}

SynthRegime::Kind parse_regime_kind(std::string_view name) {
  if (name == "iid-lognormal") return SynthRegime::Kind::IidLognormal;
  if (name == "regime-switching") return SynthRegime::Kind::RegimeSwitching;
  throw ConfigError("unknown synthetic regime '" + std::string(name) + "'");
}

std::string_view to_string(SynthRegime::Kind kind) {
  return kind == SynthRegime::Kind::IidLognormal ? "iid-lognormal" : "regime-switching";
}

ReturnSeries synth_returns(std::size_t assets, std::size_t periods, const SynthRegime& regime, std::uint64_t seed) {
  if (assets < 2) throw ConfigError("synthetic data needs at least two assets");
  if (periods < 1) throw ConfigError("synthetic data needs at least one period");
  if (!(regime.band_lo > 0.0) || !(regime.band_hi >= regime.band_lo) || !std::isfinite(regime.band_hi)) {
    throw ConfigError("synthetic return band must satisfy 0 < lo <= hi");
  }
  if (regime.vol < 0.0 || regime.vol_spread < 0.0 || regime.turbulent_vol_scale < 0.0) {
    throw ConfigError("volatilities must be non-negative");
  }
  if (regime.switch_probability < 0.0 || regime.switch_probability > 1.0) {
    throw ConfigError("switch probability must lie in [0, 1]");
  }

  std::vector<double> drift(assets);
  std::vector<double> vol(assets);
  for (std::size_t j = 0; j < assets; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(assets - 1) - 0.5;
    drift[j] = regime.drift + regime.drift_spread * u;
    vol[j] = std::max(0.0, regime.vol + regime.vol_spread * u);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution flip(regime.switch_probability);

  ReturnSeries r;
  r.returns.resize(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(assets));
  bool turbulent = false;
  for (std::size_t n = 0; n < periods; ++n) {
    if (regime.kind == SynthRegime::Kind::RegimeSwitching && flip(rng)) turbulent = !turbulent;
    for (std::size_t j = 0; j < assets; ++j) {
      const double z = normal(rng);
      double mu = drift[j];
      double sigma = vol[j];
      if (turbulent) {
        mu += regime.turbulent_drift;
        sigma *= regime.turbulent_vol_scale;
      }
      const double x = std::exp(mu + sigma * z);
      r.returns(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = std::clamp(x, regime.band_lo, regime.band_hi);
    }
  }
  r.symbols.reserve(assets);
  for (std::size_t j = 0; j < assets; ++j) r.symbols.push_back("S" + std::to_string(j + 1));
  r.dates.reserve(periods);
  for (std::size_t n = 0; n < periods; ++n) r.dates.push_back(synthetic_date(n + 1));
  return r;
}

void write_returns_csv(const ReturnSeries& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<std::string> fields{"date"};
  fields.insert(fields.end(), r.symbols.begin(), r.symbols.end());
  out << csv::join(fields) << '\n';
  for (std::size_t n = 0; n < r.periods(); ++n) {
    fields.assign(1, n < r.dates.size() ? r.dates[n] : std::to_string(n + 1));
    for (std::size_t j = 0; j < r.assets(); ++j) {
      fields.push_back(csv::format_double(r.returns(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j))));
    }
    out << csv::join(fields) << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace ensemblefolio
