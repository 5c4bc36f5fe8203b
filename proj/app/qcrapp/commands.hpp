// commands.hpp: one tabular computation per CLI command

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qcrapp/config.hpp"
#include "qcrapp/csv.hpp"

namespace qcr::app {

/// A planned run: column layout plus a thread-safe row generator.
struct Plan {
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::size_t rows{0};
    std::function<Row(std::size_t)> row;
    json result = json::object(); // summary values written to the sidecar
    bool uses_seed{false};
};

/// Work that must precede the sweep (fits, single trajectories) happens here.
Plan plan_run(const RunConfig& cfg, std::uint64_t seed);

/// Row-wise a − b of two lamb-shift tables; ConfigError unless the bias
/// columns agree exactly.
Table diff_lamb(const Table& a, const Table& b);

} // namespace qcr::app
