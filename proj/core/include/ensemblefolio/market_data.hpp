#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ensemblefolio {

/// Strictly positive prices, one row per period (dates strictly increasing).
struct PriceSeries {
  std::vector<std::string> dates;
  std::vector<std::string> symbols;
  Eigen::MatrixXd prices;  // periods x assets

  [[nodiscard]] std::size_t periods() const noexcept { return static_cast<std::size_t>(prices.rows()); }
  [[nodiscard]] std::size_t assets() const noexcept { return static_cast<std::size_t>(prices.cols()); }
};

/// Gross returns x_n (price ratios), every entry > 0. dates[n] labels the
/// period whose closing price ends the ratio.
struct ReturnSeries {
  std::vector<std::string> dates;
  std::vector<std::string> symbols;
  Eigen::MatrixXd returns;  // periods x assets

  [[nodiscard]] std::size_t periods() const noexcept { return static_cast<std::size_t>(returns.rows()); }
  [[nodiscard]] std::size_t assets() const noexcept { return static_cast<std::size_t>(returns.cols()); }
};

/// Throws DataError unless every entry is finite and > 0, m >= 2, and labels match.
void validate(const ReturnSeries& r);

/// Parses a `date,<sym1>,<sym2>,...` CSV of prices. Rows are sorted by date;
/// duplicates, missing cells and non-positive prices raise DataError naming the row.
PriceSeries parse_prices(std::istream& in, std::string_view source = "<stream>");
PriceSeries load_prices(const std::filesystem::path& path);

/// Same layout as the price CSV but cells hold gross returns.
ReturnSeries parse_returns(std::istream& in, std::string_view source = "<stream>");
ReturnSeries load_returns(const std::filesystem::path& path);

/// returns[n][j] = prices[n+1][j] / prices[n][j]. Needs at least two rows.
ReturnSeries prices_to_returns(const PriceSeries& p);

/// Synthetic return generator. Asset j gets drift and volatility spread
/// linearly around the base values; the switching regime alternates between a
/// calm and a turbulent state with a per-period switch probability.
struct SynthRegime {
  enum class Kind { IidLognormal, RegimeSwitching };

  Kind kind = Kind::IidLognormal;
  double drift = 3e-4;          // mean log-return per period
  double drift_spread = 6e-4;   // drift range across assets
  double vol = 0.015;           // log-return std per period
  double vol_spread = 0.01;     // vol range across assets
  double turbulent_drift = -5e-4;
  double turbulent_vol_scale = 3.0;
  double switch_probability = 0.01;
  double band_lo = 0.8;
  double band_hi = 1.25;
};

/// Parses "iid-lognormal" or "regime-switching".
SynthRegime::Kind parse_regime_kind(std::string_view name);
std::string_view to_string(SynthRegime::Kind kind);

/// Pure function of its arguments; entries are clamped into [band_lo, band_hi].
ReturnSeries synth_returns(std::size_t assets, std::size_t periods, const SynthRegime& regime, std::uint64_t seed);

/// Writes a returns CSV in the input layout.
void write_returns_csv(const ReturnSeries& r, const std::filesystem::path& path);

}  // namespace ensemblefolio
