// runner.hpp: process-level entry points with exit-code mapping

#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace qcr::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct RunOptions {
    std::string config_path;
    std::optional<std::string> out_path; // overrides the config's out_path
    unsigned threads{0};                 // 0: hardware concurrency
    std::uint64_t seed{0};
};

/// Runs one configured command: CSV at the output path plus `<out>.json`.
/// Nothing is left on disk unless the run succeeds.
int run(const RunOptions& opt);

/// Writes diff_lamb(a, b) to `out`.
int run_diff_lamb(const std::string& a, const std::string& b, const std::string& out);

/// Applies QCRLAB_LOG (trace, debug, info, warn, error, critical, off).
void init_logging();

} // namespace qcr::app
