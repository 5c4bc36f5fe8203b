#include "qcrlab/junction.hpp"

#include <algorithm>
#include <initializer_list>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qcrlab/constants.hpp"
#include "qcrlab/errors.hpp"
#include "qcrlab/quadrature.hpp"

namespace qcr {
namespace {

using cplx = std::complex<double>;

// n_S evaluated from the exact offsets to both gap edges, so points close to
// ±Δ keep their relative precision.
double dos_from_offsets(double eps, double to_upper, double to_lower, const JunctionParams& p) {
    const double broad = p.dynes * p.delta;
    const cplx z(eps, broad);
    const cplx root = std::sqrt(cplx(to_upper, broad) * cplx(to_lower, broad));
    if (root == cplx(0.0, 0.0)) return std::numeric_limits<double>::infinity();
    return std::abs((z / root).real());
}

// 1/(exp(x)+1) without overflow.
double logistic(double x) {
    if (x > 0.0) {
        const double t = std::exp(-x);
        return t / (1.0 + t);
    }
    return 1.0 / (1.0 + std::exp(x));
}

} // namespace

void JunctionParams::validate() const {
    if (!(delta > 0.0)) throw DomainError("junction.delta must be > 0");
    if (!(r_t > 0.0)) throw DomainError("junction.r_t must be > 0");
    if (!(temp_n >= 0.0)) throw DomainError("junction.temp_n must be >= 0");
    if (!(dynes >= 0.0 && dynes < 1.0)) throw DomainError("junction.dynes must lie in [0, 1)");
}

void DeviceConfig::validate() const {
    if (junctions != 1 && junctions != 2) throw DomainError("device.junctions must be 1 or 2");
    if (!(charging_energy >= 0.0)) throw DomainError("device.charging_energy must be >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("device.alpha must lie in [0, 1]");
}

double dos(double eps, const JunctionParams& p) {
    return dos_from_offsets(eps, eps - p.delta, eps + p.delta, p);
}

double fermi(double e, double t) {
    if (t <= 0.0) {
        if (e < 0.0) return 1.0;
        if (e > 0.0) return 0.0;
        return 0.5;
    }
    if (std::isinf(e)) return e < 0.0 ? 1.0 : 0.0;
    return logistic(e / (k_boltzmann * t));
}

double forward_rate(double e, const JunctionParams& p) {
    const double delta = p.delta;
    const double broad = p.dynes * delta;

    if (p.temp_n <= 0.0) {
        // Steps restrict ε to [0, E]; n_S has the antiderivative Re sqrt(z² − Δ²).
        if (e <= 0.0) return 0.0;
        const cplx root = std::sqrt(cplx(e - delta, broad) * cplx(e + delta, broad));
        return std::max(root.real(), 0.0) / planck;
    }

    const double kt = k_boltzmann * p.temp_n;
    const double lo = std::min(0.0, e) - 40.0 * kt;
    const double hi = std::max(0.0, e) + 40.0 * kt;

    auto occupation = [e, kt](double eps) {
        return logistic((eps - e) / kt) * logistic(-eps / kt);
    };

    // Geometric ladders toward each Fermi edge: a feature of width kT next to a
    // long flat range is otherwise invisible to the Kronrod error estimate.
    std::vector<double> pts{lo, hi, 0.0, e};
    const double span = hi - lo;
    for (double c : {0.0, e}) {
        for (double d = kt; d < span; d *= 2.0) {
            pts.push_back(c - d);
            pts.push_back(c + d);
        }
    }
    const bool upper_in = delta > lo && delta < hi;
    const bool lower_in = -delta > lo && -delta < hi;
    if (upper_in) pts.push_back(delta);
    if (lower_in) pts.push_back(-delta);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double x) { return x < lo || x > hi; }),
              pts.end());

    std::vector<quad::Piece> pieces;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const bool b_edge = (upper_in && b == delta) || (lower_in && b == -delta);
        const bool a_edge = (upper_in && a == delta) || (lower_in && a == -delta);
        if (b_edge || a_edge) {
            // ε = edge ∓ s², which removes the inverse-square-root peak at the gap edge.
            const double edge = b_edge ? b : a;
            const double sign = b_edge ? -1.0 : 1.0;
            auto g = [=, &p](double s) {
                const double off = sign * s * s;
                const double eps = edge + off;
                const double up = edge > 0 ? off : eps - delta;
                const double lw = edge > 0 ? eps + delta : off;
                return 2.0 * s * dos_from_offsets(eps, up, lw, p) * occupation(eps);
            };
            const double s_max = std::sqrt(b - a);
            double s_prev = 0.0;
            for (double s = std::sqrt(std::max(broad, 1e-12 * delta)); s < s_max; s *= 2.0) {
                pieces.push_back({g, s_prev, s});
                s_prev = s;
            }
            pieces.push_back({g, s_prev, s_max});
        } else {
            pieces.push_back({[=, &p](double eps) { return dos(eps, p) * occupation(eps); }, a, b});
        }
    }

    quad::Options opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-300;
    opt.max_intervals = 50000;
    const auto r = quad::integrate(std::span<const quad::Piece>(pieces), opt);
    return r.value / planck;
}

} // namespace qcr
