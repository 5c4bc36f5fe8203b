// csv.hpp: tabular output: a `#` units line, a header row, %.17g values

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcr::app {

using Row = std::vector<double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::string> units; // empty when the source had no units line
    std::vector<Row> rows;

    /// Index of a named column; ConfigError if absent.
    std::size_t column(const std::string& name) const;
};

/// Shortest text that reads back to exactly `x`; NaN is always "nan".
std::string format_value(double x);

void write_header(std::ostream& os, const std::vector<std::string>& columns,
                  const std::vector<std::string>& units);
void write_row(std::ostream& os, const Row& r);
void write_table(std::ostream& os, const Table& t);

/// Parses what write_table emits (the units line is optional). ConfigError on
/// ragged rows or unparsable numbers.
Table read_table(std::istream& is, const std::string& name = "csv");
Table read_table_file(const std::string& path);

} // namespace qcr::app
