#include "qcrlab/dynamics.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <string>

#include "qcrlab/errors.hpp"

namespace qcr {

namespace odeint = boost::numeric::odeint;

namespace {

void normalize(std::vector<double>& p) {
    double sum = 0.0;
    for (double x : p) sum += x;
    for (double& x : p) x /= sum;
}

void check_cut(int n_cut) {
    if (n_cut < 1) throw DomainError("LadderState: n_cut must be at least 1");
}

} // namespace

void LadderState::validate() const {
    check_cut(n_cut);
    if (probs.size() != static_cast<std::size_t>(n_cut) + 1) {
        throw DomainError("LadderState: probs must hold n_cut + 1 entries");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw DomainError("LadderState: probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("LadderState: probabilities must sum to 1");
}

double LadderState::mean_n() const {
    double n = 0.0;
    for (std::size_t m = 1; m < probs.size(); ++m) n += static_cast<double>(m) * probs[m];
    return n;
}

LadderState LadderState::ground(int n_cut) {
    check_cut(n_cut);
    LadderState s{std::vector<double>(static_cast<std::size_t>(n_cut) + 1, 0.0), n_cut};
    s.probs[0] = 1.0;
    return s;
}

LadderState LadderState::thermal(double mean_n, int n_cut) {
    check_cut(n_cut);
    if (!(mean_n >= 0.0)) throw DomainError("LadderState: mean_n must be non-negative");
    if (mean_n == 0.0) return ground(n_cut);
    const double q = mean_n / (1.0 + mean_n);
    LadderState s{{}, n_cut};
    for (int m = 0; m <= n_cut; ++m) s.probs.push_back(std::pow(q, m));
    normalize(s.probs);
    return s;
}

LadderState LadderState::poisson(double mean_n, int n_cut) {
    check_cut(n_cut);
    if (!(mean_n >= 0.0)) throw DomainError("LadderState: mean_n must be non-negative");
    if (mean_n == 0.0) return ground(n_cut);
    LadderState s{{}, n_cut};
    for (int m = 0; m <= n_cut; ++m) {
        s.probs.push_back(std::exp(m * std::log(mean_n) - mean_n - std::lgamma(m + 1.0)));
    }
    normalize(s.probs);
    return s;
}

LadderState LadderState::steady(const RatePair& r, int n_cut) {
    check_cut(n_cut);
    if (!(r.up >= 0.0 && r.down > r.up)) throw DomainError("LadderState: steady state needs down > up >= 0");
    const double q = r.up / r.down;
    LadderState s{{}, n_cut};
    for (int m = 0; m <= n_cut; ++m) s.probs.push_back(std::pow(q, m));
    normalize(s.probs);
    return s;
}

void PulseSchedule::validate() const {
    if (!(width >= 0.0)) throw DomainError("PulseSchedule: width must be non-negative");
    if (!(rise_fall >= 0.0)) throw DomainError("PulseSchedule: rise_fall must be non-negative");
    if (!std::isfinite(baseline) || !std::isfinite(amplitude) || !std::isfinite(start)) {
        throw DomainError("PulseSchedule: non-finite parameter");
    }
}

double PulseSchedule::v_of_t(double t) const {
    const double top = start + rise_fall;
    const double fall = top + width;
    const double stop = fall + rise_fall;
    if (t <= start || t >= stop) return baseline;
    if (t >= top && t <= fall) return baseline + amplitude;
    // Gaussian edge with σ = rise_fall/3, shifted to vanish at the outer end.
    const double x = t < top ? top - t : t - fall;
    const double sigma = rise_fall / 3.0;
    const double floor = std::exp(-4.5);
    const double g = (std::exp(-0.5 * (x / sigma) * (x / sigma)) - floor) / (1.0 - floor);
    return baseline + amplitude * g;
}

std::vector<double> PulseSchedule::corners() const {
    return {start, start + rise_fall, start + rise_fall + width, end()};
}

RateSource dc_rate_source(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev) {
    mode.validate();
    j.validate();
    dev.validate();
    auto last_v = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
    auto last_r = std::make_shared<RatePair>();
    return [=](double v) {
        if (v != *last_v) {
            *last_r = transition_rates(v, mode, j, dev);
            *last_v = v;
        }
        return *last_r;
    };
}

RateSource tabulated_rate_source(const ModeParams& mode, const JunctionParams& j,
                                 const DeviceConfig& dev, double v_lo, double v_hi, int n) {
    if (!(v_hi > v_lo) || n < 2) throw DomainError("tabulated_rate_source: need v_lo < v_hi and n >= 2");
    auto table = std::make_shared<std::vector<RatePair>>();
    for (int i = 0; i < n; ++i) {
        table->push_back(transition_rates(v_lo + (v_hi - v_lo) * i / (n - 1), mode, j, dev));
    }
    const double step = (v_hi - v_lo) / (n - 1);
    return [=](double v) {
        if (!(v >= v_lo && v <= v_hi)) throw DomainError("tabulated_rate_source: bias outside table");
        const double x = (v - v_lo) / step;
        const auto i = std::min(static_cast<std::size_t>(x), table->size() - 2);
        const double w = x - static_cast<double>(i);
        const RatePair& a = (*table)[i];
        const RatePair& b = (*table)[i + 1];
        return RatePair{a.up + w * (b.up - a.up), a.down + w * (b.down - a.down)};
    };
}

RateSource constant_rate_source(RatePair r) {
    return [r](double) { return r; };
}

Trajectory evolve(const LadderState& init, const PulseSchedule& sched, const RateSource& env,
                  const Bath& bath, std::span<const double> times, const EvolveOptions& opt) {
    init.validate();
    sched.validate();
    if (!(bath.gamma >= 0.0 && bath.occupation >= 0.0)) throw DomainError("evolve: invalid bath");
    if (times.empty()) throw DomainError("evolve: no sample times");
    if (!(times.front() >= 0.0) || !std::is_sorted(times.begin(), times.end()) || !std::isfinite(times.back())) {
        throw DomainError("evolve: sample times must be finite, non-negative and sorted");
    }

    const int n = init.n_cut;
    auto rhs = [&](const std::vector<double>& p, std::vector<double>& dp, double t) {
        const RatePair r = env(sched.v_of_t(t));
        const double down = r.down + bath.gamma * (1.0 + bath.occupation);
        const double up = r.up + bath.gamma * bath.occupation;
        for (int m = 0; m <= n; ++m) {
            double d = -(m * down) * p[m];
            if (m < n) d += down * (m + 1) * p[m + 1] - up * (m + 1) * p[m];
            if (m > 0) d += up * m * p[m - 1];
            dp[m] = d;
        }
    };

    std::set<double> grid(times.begin(), times.end());
    grid.insert(0.0);
    for (double c : sched.corners()) {
        if (c > 0.0 && c < times.back()) grid.insert(c);
    }
    const std::vector<double> steps(grid.begin(), grid.end());

    std::vector<std::vector<double>> at;
    at.reserve(steps.size());
    double worst_leak = 0.0;
    auto observe = [&](const std::vector<double>& p, double) {
        worst_leak = std::max(worst_leak, p.back());
        at.push_back(p);
    };

    std::vector<double> p = init.probs;
    if (steps.size() == 1) {
        at.push_back(p);
    } else {
        double dt = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < steps.size(); ++i) dt = std::min(dt, steps[i] - steps[i - 1]);
        const RatePair r0 = env(sched.v_of_t(0.0));
        const double scale = (r0.down + r0.up + bath.gamma * (1.0 + 2.0 * bath.occupation)) * (n + 1);
        if (scale > 0.0) dt = std::min(dt, 0.1 / scale);
        try {
            odeint::integrate_times(odeint::make_controlled<odeint::runge_kutta_dopri5<std::vector<double>>>(
                                        opt.abs_tol, opt.rel_tol),
                                    rhs, p, steps.begin(), steps.end(), dt, observe,
                                    odeint::max_step_checker(1000000));
        } catch (const std::exception& e) {
            throw NumericError(std::string("evolve: integrator failed: ") + e.what());
        }
    }
    if (worst_leak > opt.max_leakage) {
        throw NumericError("evolve: population at the truncation edge exceeds the leakage bound", worst_leak);
    }

    Trajectory out;
    for (double t : times) {
        const auto idx = static_cast<std::size_t>(std::lower_bound(steps.begin(), steps.end(), t) - steps.begin());
        LadderState s{at[idx], n};
        for (double& x : s.probs) {
            if (x < -100.0 * opt.abs_tol) throw NumericError("evolve: probability went negative", x);
            x = std::max(x, 0.0);
        }
        out.times.push_back(t);
        out.states.push_back(std::move(s));
    }
    return out;
}

Trajectory evolve(const LadderState& init, const PulseSchedule& sched, const RateSource& env,
                  const Bath& bath, double t_end, int n, const EvolveOptions& opt) {
    if (!(t_end >= 0.0) || n < 1) throw DomainError("evolve: need t_end >= 0 and n >= 1");
    std::vector<double> times;
    for (int i = 0; i <= n; ++i) times.push_back(t_end * i / n);
    return evolve(init, sched, env, bath, times, opt);
}

double signal(const LadderState& s) { return std::sqrt(s.mean_n()); }

PulseFit extract_gamma_by_pulse_sweep(std::span<const double> widths, const PulseSchedule& sched_template,
                                      const RateSource& env, const Bath& bath, double t_probe_before,
                                      double t_probe_after, const LadderState& init,
                                      const EvolveOptions& opt) {
    sched_template.validate();
    std::set<double> distinct(widths.begin(), widths.end());
    if (distinct.size() < 2) throw NumericError("extract_gamma_by_pulse_sweep: all widths are equal");
    if (distinct.size() < 4) throw DomainError("extract_gamma_by_pulse_sweep: need at least 4 distinct widths");
    if (!(*distinct.begin() >= 0.0)) throw DomainError("extract_gamma_by_pulse_sweep: negative width");
    if (!(t_probe_before >= 0.0 && t_probe_before <= sched_template.start)) {
        throw DomainError("extract_gamma_by_pulse_sweep: t_probe_before must precede the pulse");
    }
    PulseSchedule longest = sched_template;
    longest.width = *distinct.rbegin();
    if (!(t_probe_after >= longest.end())) {
        throw DomainError("extract_gamma_by_pulse_sweep: t_probe_after must follow the longest pulse");
    }

    const double probes[] = {t_probe_before, t_probe_after};
    std::vector<double> x;
    std::vector<double> y;
    for (double w : widths) {
        PulseSchedule s = sched_template;
        s.width = w;
        const auto tr = evolve(init, s, env, bath, probes, opt);
        const double a = signal(tr.states[0]);
        const double b = signal(tr.states[1]);
        if (!(a > 0.0 && b > 0.0)) throw NumericError("extract_gamma_by_pulse_sweep: signal vanished");
        x.push_back(w);
        y.push_back(std::log(a / b));
    }

    const double count = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / count;
        my += y[i] / count;
    }
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - icpt - slope * x[i];
        ssr += r * r;
    }

    PulseFit fit;
    const double qcr_off = env(sched_template.baseline).net();
    fit.delta_gamma = 2.0 * slope;
    fit.stderr_gamma = 2.0 * std::sqrt(ssr / (count - 2.0) / sxx);
    fit.gamma_off = qcr_off + bath.gamma;
    fit.gamma_qcr = fit.delta_gamma + qcr_off;
    fit.negative = fit.gamma_qcr < 0.0;
    return fit;
}

double reset_infidelity(const LadderState& init, double hold, double v_on, const RateSource& env,
                        const Bath& bath, const EvolveOptions& opt) {
    if (!(hold > 0.0)) throw DomainError("reset_infidelity: hold must be positive");
    const PulseSchedule flat{v_on, 0.0, 0.0, 0.0, 0.0};
    const double t[] = {hold};
    const auto tr = evolve(init, flat, env, bath, t, opt);
    return std::max(0.0, 1.0 - tr.states.back().probs[0]);
}

} // namespace qcr
