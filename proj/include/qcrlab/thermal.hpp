// thermal.hpp: quantum-limited heat conduction between two normal-metal islands

#pragma once

namespace qcr {

/// Island A exchanges photonic heat with island B through a single channel and
/// relaxes to the phonon bath at t0 through electron–phonon coupling ΣΩ.
/// Give either a_coeff or (ep_sigma, volume); when both are present they must agree.
struct ThermalNetwork {
    double a_coeff{0.0};  // K⁻³
    double t0{0.0};       // K
    double p_const{0.0};  // W
    double ep_sigma{0.0}; // W m⁻³ K⁻⁵
    double volume{0.0};   // m³

    void validate() const;
    /// ΣΩ, from the material constants or from a_coeff.
    double sigma_omega() const;
    /// a = 30ħΣΩ/(πk_B²), so that the linear response is 1/(1 + a t0³).
    double a() const;
};

/// G_Q = π k_B² t / (6ħ).
double g_quantum(double t);

/// 1/(1 + a t0³).
double differential_response(double t0, double a);

/// Net heat into A at temperature t_a.
double heat_balance(const ThermalNetwork& net, double t_a, double t_b);

/// T_A solving heat_balance = 0.
double steady_state(const ThermalNetwork& net, double t_b);

} // namespace qcr
