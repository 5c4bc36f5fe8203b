// junction.hpp: NIS junction: Dynes density of states, Fermi statistics and
// the normalized forward tunneling rate F(E).

#pragma once

namespace qcr {

/// Physical identity of one normal-metal–insulator–superconductor junction.
/// Energies are in joules; use units::micro_ev at the boundaries.
struct JunctionParams {
    double delta{0.0};  // superconducting gap (J)
    double dynes{0.0};  // subgap broadening gamma_D
    double r_t{0.0};    // tunneling resistance (Ohm)
    double temp_n{0.0}; // normal-metal electron temperature (K)

    /// Throws DomainError naming the first violated invariant.
    void validate() const;
};

/// One NIS junction or a symmetric SINIS pair sharing a normal island.
struct DeviceConfig {
    int junctions{2};
    double charging_energy{0.0}; // E_N (J)
    double alpha{0.0};           // island capacitance fraction C_c/(C_c+C_j+C_m)

    void validate() const;
};

/// Dynes-broadened BCS density of states normalized to the normal state.
double dos(double eps, const JunctionParams& p);

/// Fermi–Dirac occupation; t == 0 gives the step with f(0) = 1/2.
double fermi(double e, double t);

/// F(E) = (1/h) ∫ dε n_S(ε) f(ε − E) [1 − f(ε)], in 1/s.
///
/// Electron temperature zero uses the closed-form antiderivative
/// Re sqrt((E + iγΔ)² − Δ²); otherwise globally adaptive quadrature with a
/// square-root substitution at the coherence peaks ±Δ. Throws NumericError
/// when the quadrature cannot meet its relative tolerance.
double forward_rate(double e, const JunctionParams& p);

} // namespace qcr
