// ep.hpp: two coupled lossy modes: eigenvalues, exceptional points, flux-swept transmission

#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace qcr {

using cplx = std::complex<double>;

struct TwoModeParams {
    double omega1{0.0}; // rad/s
    double kappa1{0.0}; // 1/s
    double omega2{0.0}; // rad/s
    double kappa2{0.0}; // 1/s
    double g{0.0};      // rad/s

    void validate() const;
    double detuning() const { return omega2 - omega1; }
};

/// Eigenvalues of H = [[−iκ₁/2, g], [g, δ − iκ₂/2]] (frame rotating at ω₁),
/// ordered by real part, then imaginary part.
std::pair<cplx, cplx> eigenvalues(const TwoModeParams& p);

/// (g, λ + iκ₁/2) for eigenvalue λ, normalized.
std::pair<cplx, cplx> eigenvector(const TwoModeParams& p, cplx lambda);

/// |⟨v₊|v₋⟩| of the normalized eigenvectors; 1 at coalescence.
double eigenvector_overlap(const TwoModeParams& p);

struct EpPoint {
    double delta{0.0};
    double kappa2{0.0};
    double separation{0.0}; // |λ₊ − λ₋|
    double overlap{0.0};
};

struct EpSearchBox {
    double delta_lo{0.0};
    double delta_hi{0.0};
    double kappa2_lo{0.0};
    double kappa2_hi{0.0};
};

/// Default box: |δ| ≤ 4g, 0 ≤ κ₂ ≤ κ₁ + 8g.
EpSearchBox default_ep_box(const TwoModeParams& p);

/// Points (δ, κ₂) at fixed κ₁ and g where the eigenvalues coalesce, by Newton
/// iteration on the complex discriminant from a lattice of seeds.
/// NumericError when the box holds no root.
std::vector<EpPoint> ep_locus(const TwoModeParams& p_template);
std::vector<EpPoint> ep_locus(const TwoModeParams& p_template, const EpSearchBox& box);

/// ω₂(Φ) = ω₂,max √|cos(πΦ/Φ₀)|, Φ in units of Φ₀.
struct FluxMap {
    std::vector<double> phi_grid;
    double omega2_max{0.0};

    void validate() const;
    double omega2(double phi) const;
};

struct TransmissionMap {
    std::vector<double> phi;
    std::vector<double> omega;
    std::vector<double> s21; // |S21|, row-major: phi outer, omega inner

    double at(std::size_t i_phi, std::size_t i_omega) const { return s21[i_phi * omega.size() + i_omega]; }
};

/// |S21| of a feedline notch-coupled to mode 1 at rate kappa_ext ≤ κ₁:
/// S21 = 1 − i(κ_ext/2)·[(ω − H)⁻¹]₁₁ with H = [[ω₁ − iκ₁/2, g], [g, ω₂(Φ) − iκ₂/2]].
/// The template's omega2 is ignored.
TransmissionMap transmission_map(const FluxMap& fm, const TwoModeParams& p_template,
                                 std::span<const double> probe_grid, double kappa_ext);

} // namespace qcr
