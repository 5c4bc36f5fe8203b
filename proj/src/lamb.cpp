#include "qcrlab/lamb.hpp"

#include <algorithm>
#include <array>
#include <math.h>  // boost 1.74 pchip calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcrlab/errors.hpp"
#include "qcrlab/quadrature.hpp"

namespace qcr {

namespace {

constexpr int kLevels = 9;

// Integration points of [a, b] including every break strictly inside.
std::vector<double> with_breaks(double a, double b, std::span<const double> breaks) {
    std::vector<double> pts{a};
    for (double x : breaks) {
        if (x > a && x < b) pts.push_back(x);
    }
    pts.push_back(b);
    std::sort(pts.begin() + 1, pts.end() - 1);
    return pts;
}

} // namespace

PvResult pv_integral(const std::function<double(double)>& f, double pole, double lo, double hi,
                     std::span<const double> breaks) {
    if (!(lo < pole && pole < hi) || !std::isfinite(lo) || !std::isfinite(pole)) {
        throw DomainError("pv_integral: need finite lo < pole < hi");
    }
    double eps0 = 1e-2 * (pole != 0.0 ? std::abs(pole) : 1.0);
    eps0 = std::min(eps0, 0.5 * (pole - lo));
    if (std::isfinite(hi)) eps0 = std::min(eps0, 0.5 * (hi - pole));

    const quad::Options opt{0.0, 1e-13, 200000};
    double quad_err = 0.0;

    const auto left = with_breaks(lo, pole - eps0, breaks);
    const auto right = with_breaks(pole + eps0, hi, breaks);
    const auto rl = quad::integrate(f, left, opt);
    const auto rr = quad::integrate(f, right, opt);
    quad_err += rl.abs_err + rr.abs_err;

    // Odd part of the pole cancels pairwise in f(p+t) + f(p−t).
    const auto folded = [&](double t) { return f(pole + t) + f(pole - t); };
    std::vector<double> fold_breaks;
    for (double x : breaks) fold_breaks.push_back(std::abs(x - pole));

    std::array<double, kLevels> excised{};
    excised[0] = rl.value + rr.value;
    double scale = std::abs(rl.value) + std::abs(rr.value);
    // Folding cancels the O(1/t) terms; their residue sets the roundoff floor.
    const double residue = 0.5 * eps0 * (std::abs(f(pole + eps0)) + std::abs(f(pole - eps0)));
    const quad::Options ring_opt{std::max(1e-15 * scale, 1e-12 * residue), 1e-10, 200000};
    double eps = eps0;
    for (int k = 1; k < kLevels; ++k) {
        const auto ring = quad::integrate(folded, with_breaks(0.5 * eps, eps, fold_breaks), ring_opt);
        quad_err += ring.abs_err;
        excised[k] = excised[k - 1] + ring.value;
        scale = std::max(scale, std::abs(excised[k]));
        eps *= 0.5;
    }

    // Richardson table in powers of ε; keep the entry with the smallest
    // disagreement among its neighbours.
    std::array<std::array<double, kLevels>, kLevels> t{};
    double best = excised[kLevels - 1];
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kLevels; ++k) {
        t[k][0] = excised[k];
        double pow2 = 1.0;
        for (int m = 1; m <= k; ++m) {
            pow2 *= 2.0;
            t[k][m] = t[k][m - 1] + (t[k][m - 1] - t[k - 1][m - 1]) / (pow2 - 1.0);
            const double err = std::max(std::abs(t[k][m] - t[k][m - 1]),
                                        std::abs(t[k][m] - t[k - 1][m - 1]));
            if (err <= best_err) {
                best_err = err;
                best = t[k][m];
            }
        }
    }

    const double total_err = best_err + quad_err;
    if (!(total_err <= 1e-6 * scale + std::numeric_limits<double>::min())) {
        throw NumericError("pv_integral: excision sequence did not converge", total_err);
    }
    return {best, total_err};
}

std::vector<double> lamb_grid(double omega_r, int n, double span) {
    if (!(omega_r > 0.0) || n < 4 || !(span > 1.0)) throw DomainError("lamb_grid: invalid arguments");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double a = std::log(omega_r / span);
    const double b = std::log(omega_r * span);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    g.front() = omega_r / span;
    g.back() = omega_r * span;
    return g;
}

LambResult lamb_shift(const SpectralDensity& s, double omega_r) {
    s.validate();
    if (!(omega_r > 0.0)) throw DomainError("lamb_shift: omega_r must be positive");
    if (s.grid.size() < 4) throw DomainError("lamb_shift: need at least four grid points");
    const double w0 = s.grid.front();
    const double w1 = s.grid.back();
    if (!(w0 < omega_r && omega_r < w1)) throw DomainError("lamb_shift: pole outside grid");
    if (w0 > omega_r / 50.0 || w1 < 50.0 * omega_r) {
        throw DomainError("lamb_shift: grid must span at least [omega_r/50, 50 omega_r]");
    }

    const double r = omega_r;
    const double r2 = r * r;
    // γ[1/(ω−r) + 1/(ω+r) − 2/ω] = 2r²γ / (ω(ω² − r²))
    const auto kernel = [r, r2](double w) { return 2.0 * r2 / (w * (w - r) * (w + r)); };

    auto x = s.grid;
    auto y = s.values;
    const boost::math::interpolators::pchip<std::vector<double>> gamma(std::move(x), std::move(y));
    const auto f = [&](double w) { return gamma(w) * kernel(w); };
    const auto inner = pv_integral(f, r, w0, w1, s.grid);

    // Below the grid γ = γ₀ ω/ω₀.
    const double g0 = s.values.front();
    const double below = g0 / w0 * r * std::log((r - w0) / (r + w0));

    // Above the grid γ = a + bω from the last segment.
    const std::size_t n = s.grid.size();
    const double slope = (s.values[n - 1] - s.values[n - 2]) / (s.grid[n - 1] - s.grid[n - 2]);
    const double icpt = s.values[n - 1] - slope * w1;
    const double above = -icpt * std::log1p(-r2 / (w1 * w1)) + slope * r * std::log((w1 + r) / (w1 - r));

    const double total = inner.value + below + above;
    const double scale = 1.0 / (2.0 * std::numbers::pi);
    return {-scale * total, scale * inner.abs_err};
}

} // namespace qcr
