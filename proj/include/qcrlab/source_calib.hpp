// source_calib.hpp: the QCR as an incoherent photon source, and gain/noise
// calibration of an amplification chain from its high-bias output power

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qcrlab/spectrum.hpp"

namespace qcr {

struct PhotonSourceParams {
    double c_coupling{0.0}; // F
    double omega0{0.0};     // rad/s
    double z0{0.0};         // Ohm
    double l_res{0.0};      // m
    double c_per_len{0.0};  // F/m

    void validate() const;
    /// γ_tr = 2C²ω₀²Z₀/(L_res c_res), the resonator's decay rate into the line.
    double gamma_tr() const;
};

/// P_RT = 2C²ħω₀³Z₀/(L_res c_res)·(n_res − n_tl).
double output_power(const PhotonSourceParams& p, double n_res, double n_tl);

double bose_occupation(double t, double omega);
double temp_from_occupation(double n, double omega);

/// Two-bath steady occupation of the resonator: the line at n_tr with rate
/// γ_tr and the QCR with its directed rates at bias v.
double resonator_occupation(double v, const ModeParams& mode, const JunctionParams& j,
                            const DeviceConfig& dev, double gamma_tr, double n_tr);

struct CalibrationParams {
    double gamma_tr{0.0};
    double gamma_t_bar{0.0}; // QCR damping as eV/2Δ → ∞
    double gamma_x{0.0};
    double n_tr{0.0};
    double n_x{0.0};
    double omega_r{0.0};
    double delta{0.0}; // J

    void validate() const;
};

/// High-bias transmission-line input power, including the Δ²/eV correction.
double p_tr_model(double v, const CalibrationParams& cp);

struct PowerSample {
    double v{0.0};
    double p{0.0};
};

struct PowerFit {
    double a{0.0};
    double b{0.0};
    double c{0.0};
    double residual{0.0}; // RMS, W
};

/// Least squares of P = aV + b + c/V.
PowerFit fit_output_power(std::span<const PowerSample> samples);

/// G = (4a/e)(γ̄_T + γ_tr + γ_x)/(γ̄_T γ_tr).
double gain_from_fit(double a, const CalibrationParams& cp);

/// T_noise = P_out(0)/(G k_B Δf).
double noise_temperature(double p_out_zero, double gain, double bw);

struct CalibrationRecord {
    double a{0.0};
    double b{0.0};
    double c{0.0};
    double gain{0.0};
    double t_noise{0.0};
    double residual{0.0};
};

/// Fit, gain and noise temperature in one pass.
CalibrationRecord calibrate(std::span<const PowerSample> samples, double p_out_zero,
                            const CalibrationParams& cp, double bw);

struct ReflectionPoint {
    double omega{0.0};
    std::complex<double> gamma;
};

struct ReflectionFit {
    double omega_r{0.0};
    double gamma_tr{0.0};
    double gamma_int{0.0};
    double residual{0.0}; // RMS of |Γ_model − Γ|
};

/// One-port Γ = [i(ω−ω_r) + (γ_int−γ_tr)/2] / [i(ω−ω_r) + (γ_int+γ_tr)/2].
std::complex<double> reflection_model(double omega, double omega_r, double gamma_tr, double gamma_int);

/// Linearized start from 1/(1 − Γ), then Levenberg–Marquardt on Re and Im.
ReflectionFit fit_reflection(std::span<const ReflectionPoint> trace);

} // namespace qcr
