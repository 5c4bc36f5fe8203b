#include "qcrlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "qcrlab/constants.hpp"
#include "qcrlab/errors.hpp"

namespace qcr {
namespace {

constexpr double kTruncationMass = 1e-8;

double prefactor(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev) {
    return dev.junctions * std::numbers::pi * mode.alpha * mode.alpha * mode.impedance / j.r_t;
}

// Σ_τ F(τ eV_j + shift), the two tunneling directions through one junction.
double both_directions(double ev_j, double shift, const JunctionParams& j) {
    return forward_rate(ev_j + shift, j) + forward_rate(-ev_j + shift, j);
}

// W(ℓ_s) = Σ_k P_k |M_{k,k−ℓ_s}|²: weight of absorbing ℓ_s supporting-mode photons.
std::map<int, double> supporting_weights(const ModeParams& support, const DriveState& d) {
    const int cut = d.resolved_fock_cut();
    double mass = 0.0;
    for (int k = 0; k <= cut; ++k) mass += occupation_prob(k, d);
    if (mass < 1.0 - kTruncationMass) {
        throw NumericError("drive Fock truncation holds only " + std::to_string(mass) +
                               " of the photon-number distribution",
                           1.0 - mass);
    }
    std::map<int, double> w;
    for (int ls = -d.l_max; ls <= d.l_max; ++ls) w[ls] = 0.0;
    for (int k = 0; k <= cut; ++k) {
        const double pk = occupation_prob(k, d);
        if (pk == 0.0) continue;
        for (int ls = -d.l_max; ls <= d.l_max; ++ls) {
            const int l = k - ls;
            if (l < 0) continue;
            w[ls] += pk * fock_matrix_sq(k, l, support.rho);
        }
    }
    return w;
}

template <class F>
double golden_section_min(F&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if (b - a > tol) throw NumericError("golden-section search did not converge", b - a);
    return 0.5 * (a + b);
}

} // namespace

void ModeParams::validate() const {
    if (!(omega > 0.0)) throw DomainError("mode.omega must be > 0");
    if (!(impedance > 0.0)) throw DomainError("mode.impedance must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("mode.alpha must lie in [0, 1]");
    if (!(rho >= 0.0)) throw DomainError("mode.rho must be >= 0");
}

double default_rho(double alpha, double impedance) {
    return alpha * std::sqrt(std::numbers::pi * impedance / von_klitzing);
}

void DriveState::validate() const {
    if (!(mean_n >= 0.0)) throw DomainError("drive.mean_n must be >= 0");
    if (l_max < 0) throw DomainError("drive.l_max must be >= 0");
}

int DriveState::resolved_fock_cut() const {
    if (fock_cut >= 0) return fock_cut;
    double mass = 0.0;
    int k = 0;
    for (; k < 100000; ++k) {
        mass += occupation_prob(k, *this);
        if (mass >= 1.0 - 1e-12 && static_cast<double>(k) >= mean_n) break;
    }
    return k;
}

void SpectralDensity::validate() const {
    if (grid.size() != values.size()) throw DomainError("spectral density grid/value size mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError("spectral density grid must be strictly increasing");
    }
    for (double v : values) {
        if (!(v >= 0.0)) throw DomainError("spectral density values must be >= 0");
    }
}

double fock_matrix_sq(int k, int l, double rho) {
    if (k < 0 || l < 0) throw DomainError("Fock indices must be >= 0");
    if (rho == 0.0) return k == l ? 1.0 : 0.0;
    const int m = std::min(k, l);
    const int big = std::max(k, l);
    const unsigned d = static_cast<unsigned>(big - m);
    const double x = rho * rho;
    const double lag = std::assoc_laguerre(static_cast<unsigned>(m), d, x);
    if (lag == 0.0) return 0.0;
    const double log_val = -x + 2.0 * d * std::log(rho) + std::lgamma(m + 1.0) -
                           std::lgamma(big + 1.0) + 2.0 * std::log(std::abs(lag));
    return std::exp(log_val);
}

double occupation_prob(int k, const DriveState& d) {
    if (k < 0) throw DomainError("Fock index must be >= 0");
    const double n = d.mean_n;
    if (n == 0.0) return k == 0 ? 1.0 : 0.0;
    if (d.distribution == PhotonStatistics::coherent) {
        return std::exp(-n + k * std::log(n) - std::lgamma(k + 1.0));
    }
    return std::exp(k * std::log(n / (1.0 + n))) / (1.0 + n);
}

RatePair rf_rates(double v, const ModeParams& primary, const ModeParams& support,
                  const DriveState& d, const JunctionParams& j, const DeviceConfig& dev) {
    primary.validate();
    support.validate();
    d.validate();
    j.validate();
    dev.validate();
    const double ev_j = e_charge * v / dev.junctions;
    const double ep = hbar * primary.omega;
    const double es = hbar * support.omega;
    RatePair r;
    for (const auto& [ls, w] : supporting_weights(support, d)) {
        if (w == 0.0) continue;
        const double shift = ls * es - dev.charging_energy;
        r.down += w * both_directions(ev_j, ep + shift, j);
        r.up += w * both_directions(ev_j, -ep + shift, j);
    }
    const double pre = prefactor(primary, j, dev);
    r.down *= pre;
    r.up *= pre;
    return r;
}

double gamma_rf(double v, const ModeParams& primary, const ModeParams& support,
                const DriveState& d, const JunctionParams& j, const DeviceConfig& dev,
                Coupling kind) {
    const RatePair r = rf_rates(v, primary, support, d, j, dev);
    return kind == Coupling::net ? r.net() : r.down;
}

RatePair transition_rates(double v, const ModeParams& mode, const JunctionParams& j,
                          const DeviceConfig& dev) {
    mode.validate();
    j.validate();
    dev.validate();
    const double ev_j = e_charge * v / dev.junctions;
    const double ep = hbar * mode.omega;
    const double pre = prefactor(mode, j, dev);
    return {pre * both_directions(ev_j, -ep - dev.charging_energy, j),
            pre * both_directions(ev_j, ep - dev.charging_energy, j)};
}

double gamma_dc(double v, const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev) {
    return transition_rates(v, mode, j, dev).net();
}

double steady_p1(const RatePair& r) {
    if (!(r.up >= 0.0 && r.down >= 0.0)) throw DomainError("rates must be >= 0");
    const double total = r.up + r.down;
    if (!(total > 0.0)) throw DomainError("steady state undefined: both rates vanish");
    return r.up / total;
}

double effective_temperature(const RatePair& r, double omega) {
    if (!(r.up > 0.0 && r.down > r.up)) {
        throw DomainError("effective temperature requires down > up > 0");
    }
    return hbar * omega / (k_boltzmann * std::log(r.down / r.up));
}

OptimalBias optimal_bias(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev) {
    j.validate();
    const double vj_max = 2.0 * j.delta / e_charge;
    auto temp_at = [&](double vj) {
        const RatePair r = transition_rates(vj * dev.junctions, mode, j, dev);
        if (!(r.up > 0.0 && r.down > r.up)) return std::numeric_limits<double>::infinity();
        return effective_temperature(r, mode.omega);
    };

    constexpr int scan = 200;
    int best = 0;
    double best_t = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan; ++i) {
        const double t = temp_at(vj_max * i / scan);
        if (t < best_t) {
            best_t = t;
            best = i;
        }
    }
    if (!std::isfinite(best_t)) throw NumericError("no bias with a finite effective temperature");
    const double lo = vj_max * std::max(best - 1, 0) / scan;
    const double hi = vj_max * std::min(best + 1, scan) / scan;
    const double vj = golden_section_min(temp_at, lo, hi, 1e-10 * vj_max);
    OptimalBias out{vj * dev.junctions, vj, temp_at(vj)};
    if (best_t < out.temperature) out = {vj_max * best / scan * dev.junctions, vj_max * best / scan, best_t};
    return out;
}

OnOffRatio on_off_ratio(const ModeParams& mode, const JunctionParams& j, const DeviceConfig& dev) {
    j.validate();
    const double vj_max = j.delta / e_charge;
    auto neg_gamma = [&](double vj) { return -gamma_dc(vj * dev.junctions, mode, j, dev); };

    constexpr int scan = 100;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan; ++i) {
        const double g = neg_gamma(vj_max * i / scan);
        if (g < best_val) {
            best_val = g;
            best = i;
        }
    }
    const double lo = vj_max * std::max(best - 1, 0) / scan;
    const double hi = vj_max * std::min(best + 1, scan) / scan;
    double vj = golden_section_min(neg_gamma, lo, hi, 1e-10 * vj_max);
    double g_on = -neg_gamma(vj);
    if (-best_val > g_on) {
        vj = vj_max * best / scan;
        g_on = -best_val;
    }
    const double g_off = gamma_dc(0.0, mode, j, dev);
    if (!(g_off > 0.0)) throw NumericError("off-state coupling vanishes; on/off ratio undefined");
    return {g_on / g_off, vj * dev.junctions, g_on, g_off};
}

SpectralDensity tabulate_spectrum(double v, std::span<const double> grid,
                                  const ModeParams& mode_template, const JunctionParams& j,
                                  const DeviceConfig& dev) {
    SpectralDensity s;
    s.grid.assign(grid.begin(), grid.end());
    s.values.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw DomainError("spectrum grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("spectrum grid must be strictly increasing");
        ModeParams m = mode_template;
        m.omega = grid[i];
        s.values.push_back(gamma_dc(v, m, j, dev));
    }
    return s;
}

} // namespace qcr
