// spectrum.hpp: bias- and drive-dependent environment coupling of a resonator
// mode to the QCR: transition rates, steady state, effective temperature.

#pragma once

#include <span>
#include <vector>

#include "qcrlab/junction.hpp"

namespace qcr {

struct ModeParams {
    double omega{0.0};     // angular frequency (rad/s)
    double impedance{0.0}; // characteristic impedance Z (Ohm)
    double alpha{0.0};     // capacitance fraction of this mode at the island
    double rho{0.0};       // junction-interaction parameter

    void validate() const;
};

/// ρ = α sqrt(π Z / R_K), the default interaction parameter for a mode.
double default_rho(double alpha, double impedance);

enum class PhotonStatistics { coherent, thermal };

/// Occupation of the supporting (driven) mode.
struct DriveState {
    double mean_n{0.0};
    PhotonStatistics distribution{PhotonStatistics::coherent};
    int l_max{8};     // largest |ℓ_s| kept
    int fock_cut{-1}; // largest Fock index kept; negative selects it automatically

    void validate() const;
    /// fock_cut, or the smallest cut holding all but 1e-12 of the probability mass.
    int resolved_fock_cut() const;
};

struct RatePair {
    double up{0.0};   // Γ_{0→1}
    double down{0.0}; // Γ_{1→0}

    double net() const { return down - up; }
};

/// γ_T(ω) on a frequency grid at fixed bias and drive.
struct SpectralDensity {
    std::vector<double> grid;   // rad/s, strictly increasing
    std::vector<double> values; // 1/s

    void validate() const;
};

enum class Coupling { net, absorption };

/// |M_kl|² of the displacement operator exp(iρ(a + a†)) in the Fock basis.
double fock_matrix_sq(int k, int l, double rho);

/// P_k for the drive's photon statistics.
double occupation_prob(int k, const DriveState& d);

/// Directed rates of the primary mode with the supporting mode driven.
/// `v` is the device bias; each junction sees v / junctions.
RatePair rf_rates(double v, const ModeParams& primary, const ModeParams& support,
                  const DriveState& d, const JunctionParams& j, const DeviceConfig& dev);

/// Multiphoton coupling strength of the primary mode (net damping by default).
double gamma_rf(double v, const ModeParams& primary, const ModeParams& support,
                const DriveState& d, const JunctionParams& j, const DeviceConfig& dev,
                Coupling kind = Coupling::net);

/// Relaxation (photon absorption by the junctions) and excitation rates of a
/// single undriven mode.
RatePair transition_rates(double v, const ModeParams& mode, const JunctionParams& j,
                          const DeviceConfig& dev);

/// Net coupling strength γ_T = Γ_{1→0} − Γ_{0→1}.
double gamma_dc(double v, const ModeParams& mode, const JunctionParams& j,
                const DeviceConfig& dev);

/// p₁ = up / (up + down).
double steady_p1(const RatePair& r);

/// T = ħω / (k_B ln(down/up)); DomainError unless down > up > 0.
double effective_temperature(const RatePair& r, double omega);

struct OptimalBias {
    double voltage{0.0};          // device bias
    double junction_voltage{0.0}; // bias across one junction
    double temperature{0.0};      // achieved effective temperature
};

/// Bias minimizing the effective temperature, searched over junction biases
/// in [0, 2Δ/e]: a coarse scan brackets the minimum, golden section refines it.
OptimalBias optimal_bias(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev);

struct OnOffRatio {
    double ratio{0.0};
    double v_on{0.0}; // device bias of the on state
    double gamma_on{0.0};
    double gamma_off{0.0};
};

/// γ(V_on)/γ(0), with V_on the bias of largest damping inside the refrigeration
/// window |eV_j| ≤ Δ.
OnOffRatio on_off_ratio(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev);

/// Net γ_T(ω) on `grid`, holding the template's impedance and α fixed.
SpectralDensity tabulate_spectrum(double v, std::span<const double> grid,
                                  const ModeParams& mode_template, const JunctionParams& j,
                                  const DeviceConfig& dev);

} // namespace qcr
