// config.hpp: loading and resolving run configurations

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcrapp/schema.hpp"
#include "qcrlab/junction.hpp"
#include "qcrlab/spectrum.hpp"

namespace qcr::app {

struct RunConfig {
    std::string command;
    json params;              // defaults filled, derived values added
    std::vector<double> grid; // empty when the command takes none
    std::optional<std::string> out_path;
};

/// Schema validation, defaults and cross-field checks. Every parameter the run
/// will use ends up in `params`. Throws ConfigError naming the field.
RunConfig resolve_config(json doc);
RunConfig load_config_file(const std::string& path);

/// Sidecar document: command, resolved params and grid.
json provenance(const RunConfig& cfg);

// Typed views of resolved parameter blocks.
JunctionParams junction_from(const json& j);
DeviceConfig device_from(const json& d);
ModeParams mode_from(const json& m);

/// Device bias for x = eV/(2Δ).
double bias_from_x(double x, const JunctionParams& j);

} // namespace qcr::app
