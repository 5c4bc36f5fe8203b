// lamb.hpp: principal-value integration and the broadband Lamb shift of a mode

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qcrlab/spectrum.hpp"

namespace qcr {

struct PvResult {
    double value{0.0};
    double abs_err{0.0};
};

struct LambResult {
    double shift{0.0};   // ω_L (rad/s)
    double abs_err{0.0}; // rad/s
};

/// Cauchy principal value of ∫ f over [lo, hi] (hi may be +inf) with a simple
/// pole at `pole`. Symmetric excisions ε_k = ε₀·2⁻ᵏ (k = 0..8, ε₀ = 10⁻²|pole|)
/// are extrapolated to ε → 0. `breaks` are extra subdivision points for
/// piecewise-smooth integrands.
PvResult pv_integral(const std::function<double(double)>& f, double pole, double lo, double hi,
                     std::span<const double> breaks = {});

/// ω_L = −PV∫₀^∞ dω/2π γ_T(ω)[1/(ω−ω_r) + 1/(ω+ω_r) − 2/ω].
/// γ_T is interpolated with a monotone cubic on the grid, taken linear to zero
/// below it and extended linearly above it.
LambResult lamb_shift(const SpectralDensity& s, double omega_r);

/// n log-spaced points on [ω_r/span, ω_r·span].
std::vector<double> lamb_grid(double omega_r, int n = 4001, double span = 100.0);

} // namespace qcr
