#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ensemblefolio::csv {

/// Reads one RFC-4180 record (quoted fields may span lines). Returns false at EOF.
bool read_record(std::istream& in, std::vector<std::string>& fields);

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

/// Joins fields into a single record line (no trailing newline).
std::string join(const std::vector<std::string>& fields);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Parses a full decimal field; throws std::invalid_argument on trailing junk.
double parse_double(std::string_view text);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name; throws std::out_of_range if absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Reads a header row plus data rows; throws std::runtime_error if unreadable.
Table read_table(const std::filesystem::path& path);

}  // namespace ensemblefolio::csv
