#include "qcrapp/config.hpp"

#include <fstream>

#include "qcrlab/constants.hpp"
#include "qcrlab/errors.hpp"
#include "qcrlab/thermal.hpp"

namespace qcr::app {

namespace {

constexpr double kDefaultDeltaUev = 200.0;

void resolve_junction(json& j, const std::string& path) {
    const bool uev = j.contains("delta_uev");
    if (j.contains("delta_ghz")) {
        if (uev) throw ConfigError(path + ".delta_ghz: conflicts with delta_uev; give one");
        j["delta_uev"] = units::to_micro_ev(units::ghz_energy(j["delta_ghz"].get<double>()));
    } else if (!uev) {
        j["delta_uev"] = kDefaultDeltaUev;
    }
}

void resolve_mode(json& m) {
    if (!m.contains("rho")) m["rho"] = default_rho(m["alpha"].get<double>(), m["impedance"].get<double>());
}

std::vector<double> expand_grid(const json& g) {
    std::vector<double> v;
    if (g.contains("values")) {
        v = g["values"].get<std::vector<double>>();
    } else {
        const double a = g["start"].get<double>();
        const double b = g["stop"].get<double>();
        const int n = g["points"].get<int>();
        if (n == 1) {
            if (a != b) throw ConfigError("grid.points: a single point needs start == stop");
            v = {a};
        } else {
            for (int i = 0; i < n; ++i) v.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
        }
    }
    bool up = true, down = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        up = up && v[i] > v[i - 1];
        down = down && v[i] < v[i - 1];
    }
    if (v.size() > 1 && !up && !down) throw ConfigError("grid: values must be strictly ordered");
    return v;
}

void require_grid(const std::vector<double>& g, bool (*ok)(double), const std::string& what) {
    for (double x : g)
        if (!ok(x)) throw ConfigError("grid: " + what);
}

template <class F>
void as_config_error(const std::string& path, F&& f) {
    try {
        f();
    } catch (const DomainError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void check_physics(RunConfig& c) {
    auto& p = c.params;
    const auto& cmd = c.command;
    if (p.contains("junction")) {
        resolve_junction(p["junction"], "params.junction");
        as_config_error("params.junction", [&] { junction_from(p["junction"]).validate(); });
        as_config_error("params.device", [&] { device_from(p["device"]).validate(); });
    }
    for (const char* key : {"mode", "support"})
        if (p.contains(key)) {
            resolve_mode(p[key]);
            as_config_error(std::string("params.") + key, [&] { mode_from(p[key]).validate(); });
        }

    if (cmd == "sweep-bias" || cmd == "lamb-shift" || cmd == "source")
        require_grid(c.grid, [](double x) { return x >= 0.0; }, "bias eV/(2 Delta) must be >= 0");
    if (cmd == "rf-sweep") require_grid(c.grid, [](double x) { return x >= 0.0; }, "mean photon number must be >= 0");
    if (cmd == "reset-sim") {
        require_grid(c.grid, [](double x) { return x >= 0.0; }, "times must be >= 0");
        if (c.grid.size() > 1 && c.grid[1] < c.grid[0]) throw ConfigError("grid: times must increase");
        if (p["init"]["mean_n"].get<double>() > 0.25 * p["n_cut"].get<double>())
            throw ConfigError("params.init.mean_n: too large for n_cut (keep mean_n <= n_cut/4)");
    }
    if (cmd == "ep-map") {
        if (p["kappa_ext"].get<double>() > p["kappa1"].get<double>())
            throw ConfigError("params.kappa_ext: must not exceed kappa1");
        const auto& pr = p["probe"];
        if (pr["points"].get<int>() > 1 && !(pr["stop_ghz"].get<double>() > pr["start_ghz"].get<double>()))
            throw ConfigError("params.probe.stop_ghz: must exceed start_ghz");
    }
    if (cmd == "calibrate") {
        const bool power = p["kind"] == "power";
        if (p.contains("data")) {
            if (power && !p.contains("p_out_zero"))
                throw ConfigError("params.p_out_zero: required when calibrating measured power data");
        } else {
            if (c.grid.empty()) throw ConfigError("grid: required for a synthetic calibration trace");
            require_grid(c.grid, [](double x) { return x > 0.0; },
                         power ? "bias eV/(2 Delta) must be > 0" : "frequency must be > 0");
            if (power && !p.contains("p_out_zero")) {
                const auto& s = p["synthetic"];
                p["p_out_zero"] = s["gain"].get<double>() * k_boltzmann * s["t_noise"].get<double>() *
                                  p["bandwidth_hz"].get<double>();
            }
        }
    }
    if (cmd == "thermal") {
        if (!p.contains("a_coeff") && !p.contains("ep_sigma") && !p.contains("volume")) {
            p["ep_sigma"] = 2e9;
            p["volume"] = 1e-19;
        }
        if (p.contains("ep_sigma") != p.contains("volume"))
            throw ConfigError("params.volume: ep_sigma and volume go together");
        if (p["axis"] == "t0") require_grid(c.grid, [](double x) { return x > 0.0; }, "T0 must be > 0");
        else require_grid(c.grid, [](double x) { return x >= 0.0; }, "T_B must be >= 0");
        ThermalNetwork n;
        n.t0 = p["t0"].get<double>();
        n.p_const = p["p_const"].get<double>();
        n.a_coeff = p.value("a_coeff", 0.0);
        n.ep_sigma = p.value("ep_sigma", 0.0);
        n.volume = p.value("volume", 0.0);
        as_config_error("params", [&] { n.validate(); });
        p["a_resolved"] = n.a();
    }
}

} // namespace

JunctionParams junction_from(const json& j) {
    JunctionParams p;
    p.delta = units::micro_ev(j.at("delta_uev").get<double>());
    p.dynes = j.at("dynes").get<double>();
    p.r_t = j.at("r_t").get<double>();
    p.temp_n = j.at("temp_n").get<double>();
    return p;
}

DeviceConfig device_from(const json& d) {
    DeviceConfig c;
    c.junctions = d.at("junctions").get<int>();
    c.charging_energy = units::micro_ev(d.at("charging_energy_uev").get<double>());
    return c;
}

ModeParams mode_from(const json& m) {
    ModeParams p;
    p.omega = units::ghz_angular(m.at("f_ghz").get<double>());
    p.impedance = m.at("impedance").get<double>();
    p.alpha = m.at("alpha").get<double>();
    p.rho = m.at("rho").get<double>();
    return p;
}

double bias_from_x(double x, const JunctionParams& j) { return 2.0 * j.delta * x / e_charge; }

RunConfig resolve_config(json doc) {
    static const SchemaValidator validator(config_schema());
    validator.apply(doc);
    RunConfig c;
    c.command = doc["command"].get<std::string>();
    c.params = doc["params"];
    if (doc.contains("grid")) c.grid = expand_grid(doc["grid"]);
    if (doc.contains("out_path")) c.out_path = doc["out_path"].get<std::string>();
    check_physics(c);
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return resolve_config(std::move(doc));
}

json provenance(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["params"] = cfg.params;
    j["grid"] = cfg.grid;
    return j;
}

} // namespace qcr::app
