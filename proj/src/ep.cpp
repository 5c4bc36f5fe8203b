#include "qcrlab/ep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcrlab/errors.hpp"

namespace qcr {

namespace {

const cplx kI{0.0, 1.0};

// Discriminant of the characteristic polynomial, factored so that it vanishes
// exactly when κ₂ − κ₁ = 4g and δ = 0 in floating point.
cplx discriminant(double delta, double kappa1, double kappa2, double g) {
    const cplx a{delta, -0.5 * ((kappa2 - kappa1) - 4.0 * g)};
    const cplx b{delta, -0.5 * ((kappa2 - kappa1) + 4.0 * g)};
    return a * b;
}

bool before(const cplx& x, const cplx& y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() > y.imag());
}

} // namespace

void TwoModeParams::validate() const {
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0)) throw DomainError("TwoModeParams: loss rates must be non-negative");
    if (!(g >= 0.0)) throw DomainError("TwoModeParams: coupling must be non-negative");
    if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(kappa1) || !std::isfinite(kappa2) ||
        !std::isfinite(g)) {
        throw DomainError("TwoModeParams: non-finite parameter");
    }
}

std::pair<cplx, cplx> eigenvalues(const TwoModeParams& p) {
    p.validate();
    const double delta = p.detuning();
    const cplx trace{delta, -0.5 * (p.kappa1 + p.kappa2)};
    const cplx root = std::sqrt(discriminant(delta, p.kappa1, p.kappa2, p.g));
    // Larger root first, the other from the determinant: no cancellation when |δ| ≫ κ, g.
    const cplx big = std::real(std::conj(trace) * root) >= 0.0 ? trace + root : trace - root;
    const cplx det = cplx{0.0, -0.5 * p.kappa1} * cplx{delta, -0.5 * p.kappa2} - p.g * p.g;
    cplx l1 = 0.5 * big;
    cplx l2 = big == cplx{} ? cplx{} : det / l1;
    if (before(l2, l1)) std::swap(l1, l2);
    return {l1, l2};
}

std::pair<cplx, cplx> eigenvector(const TwoModeParams& p, cplx lambda) {
    p.validate();
    cplx u{p.g, 0.0};
    cplx w = lambda + kI * (0.5 * p.kappa1);
    const double norm = std::sqrt(std::norm(u) + std::norm(w));
    if (norm == 0.0) return {1.0, 0.0};
    return {u / norm, w / norm};
}

double eigenvector_overlap(const TwoModeParams& p) {
    const auto [lp, lm] = eigenvalues(p);
    const auto a = eigenvector(p, lp);
    const auto b = eigenvector(p, lm);
    return std::abs(std::conj(a.first) * b.first + std::conj(a.second) * b.second);
}

EpSearchBox default_ep_box(const TwoModeParams& p) {
    p.validate();
    return {-4.0 * p.g, 4.0 * p.g, 0.0, p.kappa1 + 8.0 * p.g};
}

std::vector<EpPoint> ep_locus(const TwoModeParams& p_template) {
    return ep_locus(p_template, default_ep_box(p_template));
}

std::vector<EpPoint> ep_locus(const TwoModeParams& p_template, const EpSearchBox& box) {
    p_template.validate();
    const double g = p_template.g;
    const double k1 = p_template.kappa1;
    if (!(g > 0.0)) throw DomainError("ep_locus: coupling must be positive");
    if (!(box.delta_lo <= box.delta_hi && box.kappa2_lo <= box.kappa2_hi)) {
        throw DomainError("ep_locus: empty search box");
    }
    const auto residual = [&](double d, double k2) { return std::abs(discriminant(d, k1, k2, g)); };

    std::vector<EpPoint> found;
    const int seeds = 7;
    for (int i = 0; i < seeds; ++i) {
        for (int k = 0; k < seeds; ++k) {
            double d = box.delta_lo + (box.delta_hi - box.delta_lo) * i / (seeds - 1);
            double k2 = box.kappa2_lo + (box.kappa2_hi - box.kappa2_lo) * k / (seeds - 1);
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                const cplx a{d, -0.5 * ((k2 - k1) - 4.0 * g)};
                const cplx b{d, -0.5 * ((k2 - k1) + 4.0 * g)};
                const cplx f = a * b;
                const cplx c = a + b; // ∂D/∂δ; ∂D/∂κ₂ = −ic/2
                const double det = -0.5 * std::norm(c);
                if (det == 0.0) break;
                // Solve [[c.re, c.im/2], [c.im, −c.re/2]] (dδ, dκ₂) = −(f.re, f.im).
                const double dd = (-f.real() * (-0.5 * c.real()) + f.imag() * (0.5 * c.imag())) / det;
                const double dk = (-f.imag() * c.real() + f.real() * c.imag()) / det;
                d += dd;
                k2 += dk;
                if (std::abs(dd) + std::abs(dk) <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(k2) + g)) {
                    ok = true;
                    break;
                }
            }
            if (!ok || !std::isfinite(d) || !std::isfinite(k2)) continue;

            // Polish to the floating-point neighbour with the smallest residual.
            if (std::abs(d) <= 1e-9 * g && residual(0.0, k2) <= residual(d, k2)) d = 0.0;
            for (int dir : {-1, 1}) {
                double trial = k2;
                for (int s = 0; s < 64; ++s) {
                    trial = std::nextafter(trial, dir * std::numeric_limits<double>::infinity());
                    if (residual(d, trial) < residual(d, k2)) k2 = trial;
                }
            }
            if (d < box.delta_lo || d > box.delta_hi || k2 < box.kappa2_lo || k2 > box.kappa2_hi) continue;
            const bool duplicate = std::any_of(found.begin(), found.end(), [&](const EpPoint& e) {
                return std::abs(e.delta - d) + std::abs(e.kappa2 - k2) < 1e-6 * g;
            });
            if (duplicate) continue;

            TwoModeParams p = p_template;
            p.omega2 = p.omega1 + d;
            p.kappa2 = k2;
            const auto [lp, lm] = eigenvalues(p);
            found.push_back({d, k2, std::abs(lp - lm), eigenvector_overlap(p)});
        }
    }
    if (found.empty()) throw NumericError("ep_locus: no exceptional point inside the search box");
    std::sort(found.begin(), found.end(), [](const EpPoint& a, const EpPoint& b) {
        return a.kappa2 < b.kappa2 || (a.kappa2 == b.kappa2 && a.delta < b.delta);
    });
    return found;
}

void FluxMap::validate() const {
    if (!(omega2_max > 0.0) || !std::isfinite(omega2_max)) throw DomainError("FluxMap: omega2_max must be positive");
    for (double phi : phi_grid) {
        if (!std::isfinite(phi)) throw DomainError("FluxMap: non-finite flux");
    }
}

double FluxMap::omega2(double phi) const {
    return omega2_max * std::sqrt(std::abs(std::cos(std::numbers::pi * phi)));
}

TransmissionMap transmission_map(const FluxMap& fm, const TwoModeParams& p_template,
                                 std::span<const double> probe_grid, double kappa_ext) {
    fm.validate();
    p_template.validate();
    if (!(kappa_ext >= 0.0 && kappa_ext <= p_template.kappa1)) {
        throw DomainError("transmission_map: need 0 <= kappa_ext <= kappa1");
    }
    TransmissionMap out;
    out.phi = fm.phi_grid;
    out.omega.assign(probe_grid.begin(), probe_grid.end());
    out.s21.reserve(out.phi.size() * out.omega.size());
    const double g2 = p_template.g * p_template.g;
    for (double phi : out.phi) {
        const double w2 = fm.omega2(phi);
        for (double w : out.omega) {
            const cplx d1{w - p_template.omega1, 0.5 * p_template.kappa1};
            const cplx d2{w - w2, 0.5 * p_template.kappa2};
            const cplx g11 = d2 / (d1 * d2 - g2);
            out.s21.push_back(std::abs(1.0 - kI * (0.5 * kappa_ext) * g11));
        }
    }
    return out;
}

} // namespace qcr
