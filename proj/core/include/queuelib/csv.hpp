#pragma once

#include <cstdint>
#include <initializer_list>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace queuelib::csv {

// One parsed data row. `line` is the 1-based line number in the source,
// counting the header, so error messages point at what an editor shows.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  // Column index for the first of `names` present in the header.
  std::optional<std::size_t> column(std::initializer_list<std::string_view> names) const;
};

// Reads a comma-separated table with a header row. Blank lines and lines
// starting with '#' are skipped. Double-quoted fields may contain commas.
Table read(std::istream& in);

// Splits one line on `sep`, honouring double quotes, trimming whitespace.
std::vector<std::string> split(std::string_view line, char sep = ',');

std::optional<double> to_double(std::string_view s);
std::optional<std::int64_t> to_int(std::string_view s);

}  // namespace queuelib::csv
