#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qcrlab/errors.hpp"
#include "qcrlab/ep.hpp"

using namespace qcr;

namespace {

const double kG = 2.0 * M_PI * 12.5e6;
const double kW1 = 2.0 * M_PI * 5.223e9;

TwoModeParams at(double delta, double k1, double k2, double g = kG) {
    return {kW1, k1, kW1 + delta, k2, g};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Local minima of a sampled curve.
std::vector<std::size_t> minima(const std::vector<double>& y) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] < y[i - 1] && y[i] <= y[i + 1]) out.push_back(i);
    }
    return out;
}

} // namespace

TEST_CASE("eigenvalues: decoupled and coalescing examples") {
    const auto [a, b] = eigenvalues(at(3e7, 1e6, 5e6, 0.0));
    CHECK(rel(a, cplx{0.0, -0.5e6}) < 1e-15);
    CHECK(rel(b, cplx{3e7, -2.5e6}) < 1e-15);

    const auto [c, d] = eigenvalues(at(0.0, 0.0, 4.0 * kG));
    CHECK(c == d);
    CHECK(rel(c, cplx{0.0, -kG}) < 1e-15);

    const double k2 = 1.3 * kG;
    const auto [e, f] = eigenvalues(at(0.0, 0.0, k2));
    CHECK((f - e).real() == doctest::Approx(2.0 * std::sqrt(kG * kG - k2 * k2 / 16.0)).epsilon(1e-12));
    CHECK(e.imag() == doctest::Approx(f.imag()).epsilon(1e-12));
}

TEST_CASE("eigenvalues: agree with a dense eigensolver and satisfy trace and determinant") {
    for (double delta : {-3e7, 0.0, 1.1e7}) {
        for (double k1 : {0.0, 2e6}) {
            for (double k2 : {1e6, 4.0 * kG, 9e8}) {
                const auto p = at(delta, k1, k2);
                const auto [lp, lm] = eigenvalues(p);
                const cplx trace{delta, -0.5 * (k1 + k2)};
                CHECK(rel(lp + lm, trace) < 1e-12);
                const cplx det = cplx{0.0, -0.5 * k1} * cplx{delta, -0.5 * k2} - kG * kG;
                CHECK(rel(lp * lm, det) < 1e-12);
                CHECK(lp.imag() <= 0.0);
                CHECK(lm.imag() <= 0.0);

                Eigen::Matrix2cd h;
                h << cplx{0.0, -0.5 * k1}, kG, kG, cplx{delta, -0.5 * k2};
                Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(h);
                const cplx x = es.eigenvalues()(0);
                const cplx y = es.eigenvalues()(1);
                const double scale = std::abs(trace) + kG;
                const double direct = std::abs(x - lp) + std::abs(y - lm);
                const double crossed = std::abs(x - lm) + std::abs(y - lp);
                // Near coalescence the dense solver loses half its digits.
                CHECK(std::min(direct, crossed) < 1e-7 * scale);
            }
        }
    }
}

TEST_CASE("eigenvalues: far detuned, the small root keeps full precision") {
    for (double delta : {-6e9, 3e9, 2e10}) {
        const auto p = at(delta, 3e6, 5e7);
        const auto [a, b] = eigenvalues(p);
        const cplx det = cplx{0.0, -1.5e6} * cplx{delta, -2.5e7} - kG * kG;
        CHECK(std::abs(a * b - det) < 1e-14 * (std::abs(det) + kG * kG));
        // Mode 1 barely hybridizes: λ ≈ −iκ₁/2 − g²/δ.
        const cplx near1 = std::abs(a) < std::abs(b) ? a : b;
        CHECK(rel(near1, cplx{-kG * kG / delta, -1.5e6}) < 1e-2);
    }
}

TEST_CASE("ep_locus: exact point without intrinsic loss") {
    const auto pts = ep_locus(at(0.0, 0.0, kG));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].delta == 0.0);
    CHECK(pts[0].kappa2 == doctest::Approx(4.0 * kG).epsilon(1e-14));
    CHECK(pts[0].separation < 1e-9 * kG);
    CHECK(pts[0].overlap > 1.0 - 1e-6);
}

TEST_CASE("ep_locus: finite intrinsic loss against a brute-force grid") {
    const double k1 = 0.1 * kG;
    const auto pts = ep_locus(at(0.0, k1, kG));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].separation < 1e-9 * kG);
    CHECK(pts[0].overlap > 1.0 - 1e-6);

    const int n = 401;
    const double dlo = -kG, dhi = kG, klo = 3.0 * kG, khi = 5.0 * kG;
    const double dstep = (dhi - dlo) / (n - 1), kstep = (khi - klo) / (n - 1);
    double best = INFINITY, bd = 0.0, bk = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double d = dlo + i * dstep;
            const double k2 = klo + k * kstep;
            // Discriminant expanded directly, independent of the library's factoring.
            const cplx z{d, -0.5 * (k2 - k1)};
            const double r = std::abs(z * z + 4.0 * kG * kG);
            if (r < best) {
                best = r;
                bd = d;
                bk = k2;
            }
        }
    }
    CHECK(std::abs(pts[0].delta - bd) <= dstep);
    CHECK(std::abs(pts[0].kappa2 - bk) <= kstep);
}

TEST_CASE("ep_locus: symmetric in detuning and box handling") {
    // Large intrinsic loss admits a second branch κ₂ = κ₁ − 4g.
    const auto pts = ep_locus(at(0.0, 6.0 * kG, kG));
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) {
        // κ₁ ± 4g need not be representable; the residual splitting is then
        // set by one ulp of κ₂.
        const double ulp = std::nextafter(p.kappa2, INFINITY) - p.kappa2;
        CHECK(p.separation <= std::max(1e-9 * kG, std::sqrt(8.0 * kG * ulp)));
        bool mirrored = false;
        for (const auto& q : pts) mirrored = mirrored || (std::abs(q.delta + p.delta) <= 1e-9 * kG &&
                                                          std::abs(q.kappa2 - p.kappa2) <= 1e-9 * kG);
        CHECK(mirrored);
    }
    CHECK(pts[0].kappa2 == doctest::Approx(2.0 * kG).epsilon(1e-12));
    CHECK(pts[1].kappa2 == doctest::Approx(10.0 * kG).epsilon(1e-12));

    const EpSearchBox empty_region{-kG, kG, 0.0, 2.0 * kG};
    CHECK_THROWS_AS(ep_locus(at(0.0, 0.0, kG), empty_region), NumericError);
    CHECK_THROWS_AS(ep_locus(at(0.0, 0.0, kG, 0.0)), DomainError);
}

TEST_CASE("square-root splitting away from the exceptional point") {
    const double k1 = 0.1 * kG;
    const auto ep = ep_locus(at(0.0, k1, kG)).front();
    std::vector<double> lx, ly;
    for (double e = 1e-6; e <= 1.0001e-3; e *= std::pow(10.0, 0.25)) {
        const auto [a, b] = eigenvalues(at(ep.delta, k1, ep.kappa2 + e * kG));
        lx.push_back(std::log(e));
        ly.push_back(std::log(std::abs(a.imag() - b.imag())));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    CHECK(sxy / sxx == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("FluxMap: SQUID tuning curve") {
    FluxMap fm{{0.0, 0.25, 0.5}, 2.0 * M_PI * 6e9};
    CHECK(fm.omega2(0.0) == fm.omega2_max);
    CHECK(fm.omega2(1.0 / 3.0) == doctest::Approx(fm.omega2_max * std::sqrt(0.5)).epsilon(1e-14));
    CHECK(fm.omega2(-0.2) == doctest::Approx(fm.omega2(0.2)).epsilon(1e-15));
    CHECK(fm.omega2(0.5) < 1e-7 * fm.omega2_max);
    FluxMap bad{{0.0}, -1.0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("transmission_map: detuned, split and merged responses") {
    const double k1 = 0.2 * kG;
    // Flux at which the tunable mode meets ω₁.
    const double w2max = 2.0 * M_PI * 6.0e9;
    const double phi_cross = std::acos(std::pow(kW1 / w2max, 2)) / M_PI;
    FluxMap fm{{0.0, phi_cross}, w2max};
    std::vector<double> probe;
    for (int i = 0; i <= 4000; ++i) probe.push_back(kW1 + (i - 2000) * 0.002 * kG);

    SUBCASE("far detuned: one Lorentzian dip at the fixed mode") {
        const auto m = transmission_map(fm, at(0.0, k1, 0.1 * kG), probe, k1);
        std::vector<double> row(m.s21.begin(), m.s21.begin() + static_cast<long>(probe.size()));
        const auto mins = minima(row);
        REQUIRE(mins.size() == 1);
        // Dispersively pulled by g²/δ; compare with the hybridized mode.
        const auto [lo, hi] = eigenvalues({kW1, k1, w2max, 0.1 * kG, kG});
        CHECK(std::abs(probe[mins[0]] - (kW1 + lo.real())) < 0.01 * kG);
        CHECK(std::abs(probe[mins[0]] - kW1) < 0.05 * kG);
        CHECK(row[mins[0]] < 0.01);
    }
    SUBCASE("weak loss: avoided crossing split by about 2g") {
        const auto m = transmission_map(fm, at(0.0, k1, 0.1 * kG), probe, k1);
        std::vector<double> row(m.s21.begin() + static_cast<long>(probe.size()), m.s21.end());
        const auto mins = minima(row);
        REQUIRE(mins.size() == 2);
        CHECK(probe[mins[1]] - probe[mins[0]] == doctest::Approx(2.0 * kG).epsilon(0.02));
    }
    SUBCASE("strong loss: a single dip at every flux") {
        FluxMap sweep{{}, w2max};
        for (int i = 0; i <= 20; ++i) sweep.phi_grid.push_back(phi_cross * (0.9 + 0.01 * i));
        const auto m = transmission_map(sweep, at(0.0, k1, 10.0 * kG), probe, k1);
        for (std::size_t i = 0; i < sweep.phi_grid.size(); ++i) {
            std::vector<double> row;
            for (std::size_t j = 0; j < probe.size(); ++j) row.push_back(m.at(i, j));
            CHECK(minima(row).size() == 1);
        }
    }
    CHECK_THROWS_AS(transmission_map(fm, at(0.0, k1, kG), probe, 2.0 * k1), DomainError);
}
