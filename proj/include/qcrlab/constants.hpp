// constants.hpp: SI physical constants and boundary unit conversions

#pragma once

#include <numbers>

namespace qcr {

// Exact SI values (2019 redefinition).
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi); // J s
inline constexpr double e_charge = 1.602176634e-19;           // C
inline constexpr double k_boltzmann = 1.380649e-23;           // J/K
inline constexpr double von_klitzing = planck / (e_charge * e_charge); // Ohm

inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace units {

inline constexpr double micro_ev(double x) { return x * 1e-6 * e_charge; }
inline constexpr double to_micro_ev(double joules) { return joules / (1e-6 * e_charge); }

// E = h f
inline constexpr double ghz_energy(double f_ghz) { return planck * f_ghz * 1e9; }
inline constexpr double ghz_angular(double f_ghz) { return two_pi * f_ghz * 1e9; }
inline constexpr double angular_ghz(double omega) { return omega / (two_pi * 1e9); }

} // namespace units
} // namespace qcr
