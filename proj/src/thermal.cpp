#include "qcrlab/thermal.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "qcrlab/constants.hpp"
#include "qcrlab/errors.hpp"

namespace qcr {

namespace {

// π k_B² / (12ħ): single-channel photonic exchange coefficient.
constexpr double kRad = std::numbers::pi * k_boltzmann * k_boltzmann / (12.0 * hbar);
// a = kA · ΣΩ
constexpr double kA = 30.0 * hbar / (std::numbers::pi * k_boltzmann * k_boltzmann);

} // namespace

void ThermalNetwork::validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw DomainError("ThermalNetwork: t0 must be positive");
    for (double x : {a_coeff, p_const, ep_sigma, volume}) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("ThermalNetwork: parameters must be non-negative");
    }
    const double so = ep_sigma * volume;
    if (so > 0.0 && a_coeff > 0.0 && std::abs(kA * so / a_coeff - 1.0) > 1e-9) {
        throw DomainError("ThermalNetwork: a_coeff disagrees with ep_sigma * volume");
    }
}

double ThermalNetwork::sigma_omega() const {
    const double so = ep_sigma * volume;
    return so > 0.0 ? so : a_coeff / kA;
}

double ThermalNetwork::a() const {
    const double so = ep_sigma * volume;
    return so > 0.0 ? kA * so : a_coeff;
}

double g_quantum(double t) {
    if (!(t >= 0.0)) throw DomainError("g_quantum: temperature must be non-negative");
    return 2.0 * kRad * t;
}

double differential_response(double t0, double a) {
    if (!(t0 > 0.0)) throw DomainError("differential_response: t0 must be positive");
    if (!(a >= 0.0)) throw DomainError("differential_response: a must be non-negative");
    return 1.0 / (1.0 + a * t0 * t0 * t0);
}

double heat_balance(const ThermalNetwork& net, double t_a, double t_b) {
    const double so = net.sigma_omega();
    const double t05 = std::pow(net.t0, 5);
    return kRad * (t_b * t_b - t_a * t_a) + so * (t05 - std::pow(t_a, 5)) + net.p_const;
}

double steady_state(const ThermalNetwork& net, double t_b) {
    net.validate();
    if (!(t_b > 0.0) || !std::isfinite(t_b)) throw DomainError("steady_state: t_b must be positive");
    const auto f = [&](double t) { return heat_balance(net, t, t_b); };
    // f decreases monotonically; f(0) ≥ 0 since every term is non-negative there.
    double hi = std::max(net.t0, t_b);
    for (int i = 0; f(hi) > 0.0; ++i) {
        if (i > 200) throw NumericError("steady_state: could not bracket the root");
        hi *= 2.0;
    }
    if (f(hi) == 0.0) return hi;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, 0.0, hi, f(0.0), f(hi),
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    if (iters >= 200) throw NumericError("steady_state: root refinement did not converge");
    // Keep the endpoint with the smaller residual.
    return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

} // namespace qcr
