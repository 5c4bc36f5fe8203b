// dynamics.hpp: Fock-ladder master equation under time-dependent QCR damping

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qcrlab/spectrum.hpp"

namespace qcr {

struct LadderState {
    std::vector<double> probs; // p_m, m = 0..n_cut
    int n_cut{0};

    void validate() const;
    double mean_n() const;

    static LadderState ground(int n_cut);
    static LadderState thermal(double mean_n, int n_cut);
    static LadderState poisson(double mean_n, int n_cut);
    /// Geometric distribution with ratio up/down.
    static LadderState steady(const RatePair& r, int n_cut);
};

/// Flat-top bias pulse on a constant baseline. The edges are Gaussian
/// segments of duration rise_fall, offset so the waveform is continuous.
struct PulseSchedule {
    double baseline{0.0};  // V
    double amplitude{0.0}; // V above baseline on the flat top
    double start{0.0};     // s, beginning of the rising edge
    double width{0.0};     // s, flat-top duration τ
    double rise_fall{0.0}; // s

    void validate() const;
    double v_of_t(double t) const;
    double end() const { return start + width + 2.0 * rise_fall; }
    /// Instants where the waveform changes form.
    std::vector<double> corners() const;
};

/// Directed QCR rates at a given device bias.
using RateSource = std::function<RatePair(double v)>;

/// Evaluates transition_rates directly, remembering the last bias.
/// The returned source is not safe to share between threads.
RateSource dc_rate_source(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev);

/// Rates precomputed on n uniform biases over [v_lo, v_hi] and interpolated
/// linearly; biases outside the table throw DomainError.
RateSource tabulated_rate_source(const ModeParams& mode, const JunctionParams& j,
                                 const DeviceConfig& dev, double v_lo, double v_hi, int n);

/// Rates that do not depend on bias.
RateSource constant_rate_source(RatePair r);

/// Extra damping channel (e.g. the readout line) with its own occupation.
struct Bath {
    double gamma{0.0};
    double occupation{0.0};
};

struct EvolveOptions {
    double abs_tol{1e-12};
    double rel_tol{1e-10};
    double max_leakage{1e-6};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<LadderState> states;
};

/// Integrates dp_m/dt from t = 0 and records the state at each of `times`
/// (non-decreasing, ≥ 0).
Trajectory evolve(const LadderState& init, const PulseSchedule& sched, const RateSource& env,
                  const Bath& bath, std::span<const double> times, const EvolveOptions& opt = {});

/// Convenience form sampling n + 1 uniform instants on [0, t_end].
Trajectory evolve(const LadderState& init, const PulseSchedule& sched, const RateSource& env,
                  const Bath& bath, double t_end, int n = 1, const EvolveOptions& opt = {});

/// Amplitude proxy √⟨n⟩.
double signal(const LadderState& s);

struct PulseFit {
    double gamma_qcr{0.0};   // QCR damping during the pulse
    double delta_gamma{0.0}; // change of the total decay rate caused by the pulse
    double stderr_gamma{0.0};
    double gamma_off{0.0};   // total decay rate with the pulse off (QCR + bath)
    bool negative{false};    // extracted gamma_qcr < 0
};

/// Repeats the pulse for each width and fits ln[A(t_b)/A(t_a)] linearly in τ;
/// twice the slope is the extra decay rate during the flat top. Edge effects
/// enter only the intercept. t_probe_before ≤ pulse start and t_probe_after
/// after the longest pulse ends, both absolute.
PulseFit extract_gamma_by_pulse_sweep(std::span<const double> widths, const PulseSchedule& sched_template,
                                      const RateSource& env, const Bath& bath, double t_probe_before,
                                      double t_probe_after, const LadderState& init,
                                      const EvolveOptions& opt = {});

/// 1 − p₀ after holding the bias at v_on for `hold`.
double reset_infidelity(const LadderState& init, double hold, double v_on, const RateSource& env,
                        const Bath& bath, const EvolveOptions& opt = {});

} // namespace qcr
