#include "qcrapp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qcrapp/schema.hpp"

namespace qcr::app {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void write_joined(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

} // namespace

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw ConfigError("csv: no column named " + name);
}

std::string format_value(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& os, const std::vector<std::string>& columns,
                  const std::vector<std::string>& units) {
    if (!units.empty()) {
        os << "# ";
        write_joined(os, units);
    }
    write_joined(os, columns);
}

void write_row(std::ostream& os, const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_value(r[i]);
    os << '\n';
}

void write_table(std::ostream& os, const Table& t) {
    write_header(os, t.columns, t.units);
    for (const auto& r : t.rows) write_row(os, r);
}

Table read_table(std::istream& is, const std::string& name) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (have_header || !t.units.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": unexpected comment line");
            t.units = split(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
            continue;
        }
        auto cells = split(line);
        if (!have_header) {
            t.columns = std::move(cells);
            have_header = true;
            if (!t.units.empty() && t.units.size() != t.columns.size())
                throw ConfigError(name + ": units line has " + std::to_string(t.units.size()) + " entries for " +
                                  std::to_string(t.columns.size()) + " columns");
            continue;
        }
        if (cells.size() != t.columns.size())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                              " values");
        Row r;
        r.reserve(cells.size());
        for (const auto& c : cells) {
            char* end = nullptr;
            const double x = std::strtod(c.c_str(), &end);
            if (c.empty() || *end != '\0')
                throw ConfigError(name + ":" + std::to_string(lineno) + ": not a number: '" + c + "'");
            r.push_back(x);
        }
        t.rows.push_back(std::move(r));
    }
    if (!have_header) throw ConfigError(name + ": missing header row");
    return t;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    return read_table(in, path);
}

} // namespace qcr::app
