#include "qcrapp/commands.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include "qcrlab/constants.hpp"
#include "qcrlab/dynamics.hpp"
#include "qcrlab/ep.hpp"
#include "qcrlab/errors.hpp"
#include "qcrlab/lamb.hpp"
#include "qcrlab/source_calib.hpp"
#include "qcrlab/spectrum.hpp"
#include "qcrlab/thermal.hpp"

namespace qcr::app {

namespace {

struct Circuit {
    JunctionParams j;
    DeviceConfig dev;
    ModeParams mode;
};

Plan make_plan(std::vector<std::string> columns, std::vector<std::string> units) {
    Plan p;
    p.columns = std::move(columns);
    p.units = std::move(units);
    return p;
}

Circuit circuit_from(const json& p) {
    return {junction_from(p["junction"]), device_from(p["device"]), mode_from(p["mode"])};
}

double t_eff_or_nan(const RatePair& r, double omega) {
    try {
        return effective_temperature(r, omega);
    } catch (const DomainError&) {
        return std::nan("");
    }
}

Plan sweep_bias(const RunConfig& cfg) {
    const auto c = circuit_from(cfg.params);
    Plan pl = make_plan({"bias", "v", "gamma_up", "gamma_down", "p1", "T_eff"}, {"1", "V", "1/s", "1/s", "1", "K"});
    pl.rows = cfg.grid.size();
    pl.row = [c, grid = cfg.grid](std::size_t i) {
        const double v = bias_from_x(grid[i], c.j);
        const RatePair r = transition_rates(v, c.mode, c.j, c.dev);
        return Row{grid[i], v, r.up, r.down, steady_p1(r), t_eff_or_nan(r, c.mode.omega)};
    };
    return pl;
}

Plan rf_sweep(const RunConfig& cfg) {
    const auto c = circuit_from(cfg.params);
    const ModeParams support = mode_from(cfg.params["support"]);
    const double v = bias_from_x(cfg.params["bias_x"].get<double>(), c.j);
    DriveState proto;
    proto.distribution = cfg.params["statistics"] == "thermal" ? PhotonStatistics::thermal : PhotonStatistics::coherent;
    proto.l_max = cfg.params["l_max"].get<int>();
    Plan pl = make_plan({"mean_n", "gamma_up", "gamma_down", "gamma_t"}, {"1", "1/s", "1/s", "1/s"});
    pl.rows = cfg.grid.size();
    pl.row = [c, support, v, proto, grid = cfg.grid](std::size_t i) {
        DriveState d = proto;
        d.mean_n = grid[i];
        const RatePair r = rf_rates(v, c.mode, support, d, c.j, c.dev);
        return Row{grid[i], r.up, r.down, r.net()};
    };
    return pl;
}

Plan lamb(const RunConfig& cfg) {
    const auto c = circuit_from(cfg.params);
    const auto freq = lamb_grid(c.mode.omega, cfg.params["spectrum_points"].get<int>(),
                                cfg.params["spectrum_span"].get<double>());
    Plan pl = make_plan({"bias", "v", "omega_l", "shift_mhz", "abs_err"}, {"1", "V", "rad/s", "MHz", "rad/s"});
    pl.rows = cfg.grid.size();
    pl.row = [c, freq, grid = cfg.grid](std::size_t i) {
        const double v = bias_from_x(grid[i], c.j);
        const auto s = tabulate_spectrum(v, freq, c.mode, c.j, c.dev);
        const auto l = lamb_shift(s, c.mode.omega);
        return Row{grid[i], v, l.shift, l.shift / two_pi * 1e-6, l.abs_err};
    };
    return pl;
}

Plan reset_sim(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto c = circuit_from(p);
    const auto& pu = p["pulse"];
    const double v_base = bias_from_x(pu["baseline_x"].get<double>(), c.j);
    double v_on = 0.0;
    if (pu.contains("amplitude_x")) {
        v_on = v_base + bias_from_x(pu["amplitude_x"].get<double>(), c.j);
    } else {
        v_on = on_off_ratio(c.mode, c.j, c.dev).v_on;
    }
    PulseSchedule sched{v_base, v_on - v_base, pu["start"].get<double>(), pu["width"].get<double>(),
                        pu["rise_fall"].get<double>()};
    sched.validate();

    RateSource env;
    if (v_on == v_base) {
        env = constant_rate_source(transition_rates(v_base, c.mode, c.j, c.dev));
    } else {
        env = tabulated_rate_source(c.mode, c.j, c.dev, std::min(v_base, v_on), std::max(v_base, v_on),
                                    p["rate_table_points"].get<int>());
    }
    const Bath bath{p["bath"]["gamma"].get<double>(), bose_occupation(p["bath"]["temp"].get<double>(), c.mode.omega)};
    const int n_cut = p["n_cut"].get<int>();
    const double n0 = p["init"]["mean_n"].get<double>();
    const LadderState init =
        p["init"]["kind"] == "thermal" ? LadderState::thermal(n0, n_cut) : LadderState::poisson(n0, n_cut);

    auto traj = std::make_shared<Trajectory>(evolve(init, sched, env, bath, cfg.grid));
    Plan pl = make_plan({"t", "v", "mean_n", "p0", "signal"}, {"s", "V", "1", "1", "1"});
    pl.rows = cfg.grid.size();
    pl.result = {{"v_on", v_on}, {"v_baseline", v_base}, {"bath_occupation", bath.occupation}};
    pl.row = [traj, sched](std::size_t i) {
        const auto& s = traj->states[i];
        const double t = traj->times[i];
        return Row{t, sched.v_of_t(t), s.mean_n(), s.probs[0], signal(s)};
    };
    return pl;
}

Plan ep_map(const RunConfig& cfg) {
    const auto& p = cfg.params;
    TwoModeParams tm;
    tm.omega1 = units::ghz_angular(p["f1_ghz"].get<double>());
    tm.kappa1 = p["kappa1"].get<double>();
    tm.kappa2 = p["kappa2"].get<double>();
    tm.g = p["g"].get<double>();
    tm.omega2 = tm.omega1;
    tm.validate();
    const double w2max = units::ghz_angular(p["f2_max_ghz"].get<double>());
    const double k_ext = p["kappa_ext"].get<double>();

    const auto& pr = p["probe"];
    const int np = pr["points"].get<int>();
    const double a = pr["start_ghz"].get<double>();
    const double b = pr["stop_ghz"].get<double>();
    std::vector<double> probe;
    for (int i = 0; i < np; ++i) probe.push_back(units::ghz_angular(np == 1 ? a : a + (b - a) * i / (np - 1)));

    Plan pl = make_plan({"phi", "f2_ghz", "probe_ghz", "s21_abs"}, {"Phi0", "GHz", "GHz", "1"});
    pl.rows = cfg.grid.size() * probe.size();
    pl.row = [tm, w2max, k_ext, probe, grid = cfg.grid](std::size_t i) {
        const std::size_t ip = i % probe.size();
        const FluxMap fm{{grid[i / probe.size()]}, w2max};
        const double w = probe[ip];
        const auto m = transmission_map(fm, tm, std::span<const double>(&w, 1), k_ext);
        return Row{fm.phi_grid[0], units::angular_ghz(fm.omega2(fm.phi_grid[0])), units::angular_ghz(w), m.at(0, 0)};
    };
    // The exceptional points of the template, for reference.
    json locus = json::array();
    for (const auto& e : ep_locus(tm))
        locus.push_back({{"delta", e.delta}, {"kappa2", e.kappa2}, {"separation", e.separation}});
    pl.result = {{"ep_locus", locus}};
    return pl;
}

Plan source(const RunConfig& cfg) {
    const auto& p = cfg.params;
    const auto c = circuit_from(p);
    const auto& r = p["resonator"];
    const PhotonSourceParams src{r["c_coupling"].get<double>(), c.mode.omega, r["z0"].get<double>(),
                                 r["l_res"].get<double>(), r["c_per_len"].get<double>()};
    src.validate();
    const double n_tl = bose_occupation(p["t_tl"].get<double>(), c.mode.omega);
    const double g_tr = src.gamma_tr();
    Plan pl = make_plan({"bias", "v", "n_res", "t_res", "power_w", "power_dbm"}, {"1", "V", "1", "K", "W", "dBm"});
    pl.rows = cfg.grid.size();
    pl.result = {{"gamma_tr", g_tr}, {"n_tl", n_tl}};
    pl.row = [c, src, n_tl, g_tr, grid = cfg.grid](std::size_t i) {
        const double v = bias_from_x(grid[i], c.j);
        const double n = resonator_occupation(v, c.mode, c.j, c.dev, g_tr, n_tl);
        const double pw = output_power(src, n, n_tl);
        const double dbm = pw > 0.0 ? 10.0 * std::log10(pw / 1e-3) : std::nan("");
        return Row{grid[i], v, n, temp_from_occupation(n, c.mode.omega), pw, dbm};
    };
    return pl;
}

CalibrationParams chain_from(const json& ch) {
    CalibrationParams cp;
    cp.gamma_tr = ch["gamma_tr"].get<double>();
    cp.gamma_t_bar = ch["gamma_t_bar"].get<double>();
    cp.gamma_x = ch["gamma_x"].get<double>();
    cp.n_tr = ch["n_tr"].get<double>();
    cp.n_x = ch["n_x"].get<double>();
    cp.omega_r = units::ghz_angular(ch["f_ghz"].get<double>());
    cp.delta = units::micro_ev(ch["delta_uev"].get<double>());
    return cp;
}

Plan calibrate_power(const RunConfig& cfg, std::uint64_t seed) {
    const auto& p = cfg.params;
    const auto cp = chain_from(p["chain"]);
    const double bw = p["bandwidth_hz"].get<double>();
    std::vector<PowerSample> samples;
    Plan pl = make_plan({"bias_V", "power_W", "fit_W"}, {"V", "W", "W"});
    if (p.contains("data")) {
        const Table t = read_table_file(p["data"].get<std::string>());
        const auto iv = t.column("bias_V");
        const auto ip = t.column("power_W");
        for (const auto& r : t.rows) samples.push_back({r[iv], r[ip]});
    } else {
        const auto& s = p["synthetic"];
        const double g = s["gain"].get<double>();
        const double floor = g * k_boltzmann * s["t_noise"].get<double>() * bw;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, 1.0);
        const double sigma = s["noise_rel"].get<double>() * floor;
        for (double x : cfg.grid) {
            const double v = 2.0 * cp.delta * x / e_charge;
            samples.push_back({v, g * p_tr_model(v, cp) + floor + sigma * noise(rng)});
        }
        pl.uses_seed = true;
    }
    const auto rec = calibrate(samples, p["p_out_zero"].get<double>(), cp, bw);
    pl.result = {{"a", rec.a}, {"b", rec.b}, {"c", rec.c}, {"gain", rec.gain}, {"t_noise", rec.t_noise},
                 {"residual", rec.residual}};
    pl.rows = samples.size();
    pl.row = [samples, rec](std::size_t i) {
        const double v = samples[i].v;
        return Row{v, samples[i].p, rec.a * v + rec.b + rec.c / v};
    };
    return pl;
}

Plan calibrate_reflection(const RunConfig& cfg, std::uint64_t seed) {
    const auto& p = cfg.params;
    std::vector<ReflectionPoint> trace;
    Plan pl = make_plan({"freq_Hz", "re_gamma", "im_gamma", "re_fit", "im_fit"}, {"Hz", "1", "1", "1", "1"});
    if (p.contains("data")) {
        const Table t = read_table_file(p["data"].get<std::string>());
        const auto f = t.column("freq_Hz");
        const auto re = t.column("re_gamma");
        const auto im = t.column("im_gamma");
        for (const auto& r : t.rows) trace.push_back({two_pi * r[f], {r[re], r[im]}});
    } else {
        const auto& s = p["synthetic"];
        const double wr = units::ghz_angular(s["f_r_ghz"].get<double>());
        const double gt = s["gamma_tr"].get<double>();
        const double gi = s["gamma_int"].get<double>();
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, s["noise_rel"].get<double>());
        for (double f : cfg.grid) {
            const double w = units::ghz_angular(f);
            const double re = noise(rng);
            const double im = noise(rng);
            trace.push_back({w, reflection_model(w, wr, gt, gi) + std::complex<double>(re, im)});
        }
        pl.uses_seed = true;
    }
    const auto fit = fit_reflection(trace);
    pl.result = {{"f_r_hz", fit.omega_r / two_pi}, {"omega_r", fit.omega_r}, {"gamma_tr", fit.gamma_tr},
                 {"gamma_int", fit.gamma_int}, {"residual", fit.residual}};
    pl.rows = trace.size();
    pl.row = [trace, fit](std::size_t i) {
        const auto& t = trace[i];
        const auto m = reflection_model(t.omega, fit.omega_r, fit.gamma_tr, fit.gamma_int);
        return Row{t.omega / two_pi, t.gamma.real(), t.gamma.imag(), m.real(), m.imag()};
    };
    return pl;
}

Plan thermal(const RunConfig& cfg) {
    const auto& p = cfg.params;
    ThermalNetwork n;
    n.t0 = p["t0"].get<double>();
    n.p_const = p["p_const"].get<double>();
    n.a_coeff = p.value("a_coeff", 0.0);
    n.ep_sigma = p.value("ep_sigma", 0.0);
    n.volume = p.value("volume", 0.0);
    const double t_b = p["t_b"].get<double>();
    Plan pl;
    pl.rows = cfg.grid.size();
    if (p["axis"] == "t0") {
        pl.columns = {"t0", "t_a", "response"};
        pl.units = {"K", "K", "1"};
        pl.row = [n, t_b, grid = cfg.grid](std::size_t i) {
            ThermalNetwork m = n;
            m.t0 = grid[i];
            return Row{grid[i], steady_state(m, t_b), differential_response(grid[i], m.a())};
        };
    } else {
        pl.columns = {"t_b", "t_a", "heat_residual", "g_q"};
        pl.units = {"K", "K", "W", "W/K"};
        pl.row = [n, grid = cfg.grid](std::size_t i) {
            const double ta = steady_state(n, grid[i]);
            return Row{grid[i], ta, heat_balance(n, ta, grid[i]), g_quantum(grid[i])};
        };
    }
    pl.result = {{"a", n.a()}, {"response_at_t0", differential_response(n.t0, n.a())}};
    return pl;
}

} // namespace

Plan plan_run(const RunConfig& cfg, std::uint64_t seed) {
    const auto& c = cfg.command;
    if (c == "sweep-bias") return sweep_bias(cfg);
    if (c == "rf-sweep") return rf_sweep(cfg);
    if (c == "lamb-shift") return lamb(cfg);
    if (c == "reset-sim") return reset_sim(cfg);
    if (c == "ep-map") return ep_map(cfg);
    if (c == "source") return source(cfg);
    if (c == "calibrate")
        return cfg.params["kind"] == "reflection" ? calibrate_reflection(cfg, seed) : calibrate_power(cfg, seed);
    if (c == "thermal") return thermal(cfg);
    throw ConfigError("command: unknown " + c);
}

Table diff_lamb(const Table& a, const Table& b) {
    const auto xa = a.column("bias");
    const auto xb = b.column("bias");
    const auto la = a.column("omega_l");
    const auto lb = b.column("omega_l");
    if (a.rows.size() != b.rows.size())
        throw ConfigError("diff-lamb: grids differ in length (" + std::to_string(a.rows.size()) + " vs " +
                          std::to_string(b.rows.size()) + ")");
    Table d;
    d.columns = {"bias", "delta_omega_l", "delta_shift_mhz"};
    d.units = {"1", "rad/s", "MHz"};
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i][xa] != b.rows[i][xb])
            throw ConfigError("diff-lamb: grids differ at row " + std::to_string(i));
        const double dw = a.rows[i][la] - b.rows[i][lb];
        d.rows.push_back({a.rows[i][xa], dw, dw / two_pi * 1e-6});
    }
    return d;
}

} // namespace qcr::app
