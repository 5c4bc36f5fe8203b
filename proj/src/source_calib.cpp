#include "qcrlab/source_calib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "qcrlab/constants.hpp"
#include "qcrlab/errors.hpp"

namespace qcr {

using cplx = std::complex<double>;

void PhotonSourceParams::validate() const {
    for (double x : {c_coupling, omega0, z0, l_res, c_per_len}) {
        if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("PhotonSourceParams: all fields must be positive");
    }
}

double PhotonSourceParams::gamma_tr() const {
    validate();
    return 2.0 * c_coupling * c_coupling * omega0 * omega0 * z0 / (l_res * c_per_len);
}

double output_power(const PhotonSourceParams& p, double n_res, double n_tl) {
    return hbar * p.omega0 * p.gamma_tr() * (n_res - n_tl);
}

double bose_occupation(double t, double omega) {
    if (!(t > 0.0) || !(omega > 0.0)) throw DomainError("bose_occupation: temperature and frequency must be positive");
    return 1.0 / std::expm1(hbar * omega / (k_boltzmann * t));
}

double temp_from_occupation(double n, double omega) {
    if (!(n > 0.0) || !(omega > 0.0)) throw DomainError("temp_from_occupation: occupation and frequency must be positive");
    return hbar * omega / (k_boltzmann * std::log1p(1.0 / n));
}

double resonator_occupation(double v, const ModeParams& mode, const JunctionParams& j,
                            const DeviceConfig& dev, double gamma_tr, double n_tr) {
    if (!(gamma_tr > 0.0) || !(n_tr >= 0.0)) throw DomainError("resonator_occupation: need gamma_tr > 0, n_tr >= 0");
    const RatePair r = transition_rates(v, mode, j, dev);
    // (γ_tr n_tr + γ_T n_T)/(γ_tr + γ_T) with γ_T n_T = up.
    const double denom = gamma_tr + r.net();
    if (!(denom > 0.0)) throw NumericError("resonator_occupation: no stable steady state", denom);
    return (gamma_tr * n_tr + r.up) / denom;
}

void CalibrationParams::validate() const {
    for (double x : {gamma_tr, gamma_t_bar, gamma_x, n_tr, n_x, delta}) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("CalibrationParams: rates, occupations and gap must be non-negative");
    }
    if (!(omega_r > 0.0)) throw DomainError("CalibrationParams: omega_r must be positive");
}

double p_tr_model(double v, const CalibrationParams& cp) {
    cp.validate();
    if (v == 0.0) throw DomainError("p_tr_model: the high-bias model is singular at v = 0");
    const double total = cp.gamma_tr + cp.gamma_t_bar + cp.gamma_x;
    if (!(total > 0.0)) return 0.0;
    const double pref = cp.gamma_tr * cp.gamma_t_bar / total;
    if (pref == 0.0) return 0.0;
    const double ev = e_charge * v;
    const double bracket = cp.gamma_x * (cp.n_x - cp.n_tr) / cp.gamma_t_bar - cp.n_tr - 0.5;
    const double correction = 0.5 * cp.delta * cp.delta / ev * (1.0 + cp.gamma_t_bar / total);
    return pref * (0.25 * ev + hbar * cp.omega_r * bracket - correction);
}

PowerFit fit_output_power(std::span<const PowerSample> samples) {
    std::set<double> distinct;
    for (const auto& s : samples) {
        if (!(s.v > 0.0) || !std::isfinite(s.p)) throw DomainError("fit_output_power: biases must be positive and powers finite");
        distinct.insert(s.v);
    }
    if (distinct.size() < 3) throw DomainError("fit_output_power: need at least three distinct biases");

    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = samples[static_cast<std::size_t>(i)].v;
        x(i, 0) = v;
        x(i, 1) = 1.0;
        x(i, 2) = 1.0 / v;
        y(i) = samples[static_cast<std::size_t>(i)].p;
    }
    const Eigen::Vector3d scale = x.colwise().norm();
    const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-12);
    if (qr.rank() < 3) throw NumericError("fit_output_power: basis {V, 1, 1/V} is rank deficient on these biases");
    const Eigen::Vector3d coef = qr.solve(y).cwiseQuotient(scale);
    const Eigen::VectorXd res = x * coef - y;
    return {coef(0), coef(1), coef(2), std::sqrt(res.squaredNorm() / static_cast<double>(n))};
}

double gain_from_fit(double a, const CalibrationParams& cp) {
    cp.validate();
    if (!(cp.gamma_t_bar > 0.0 && cp.gamma_tr > 0.0)) throw DomainError("gain_from_fit: gamma_t_bar and gamma_tr must be positive");
    return 4.0 * a / e_charge * (cp.gamma_t_bar + cp.gamma_tr + cp.gamma_x) / (cp.gamma_t_bar * cp.gamma_tr);
}

double noise_temperature(double p_out_zero, double gain, double bw) {
    if (!(gain > 0.0) || !(bw > 0.0)) throw DomainError("noise_temperature: gain and bandwidth must be positive");
    return p_out_zero / (gain * k_boltzmann * bw);
}

CalibrationRecord calibrate(std::span<const PowerSample> samples, double p_out_zero,
                            const CalibrationParams& cp, double bw) {
    const PowerFit f = fit_output_power(samples);
    CalibrationRecord r{f.a, f.b, f.c, 0.0, 0.0, f.residual};
    r.gain = gain_from_fit(f.a, cp);
    r.t_noise = noise_temperature(p_out_zero, r.gain, bw);
    return r;
}

cplx reflection_model(double omega, double omega_r, double gamma_tr, double gamma_int) {
    const cplx d{0.5 * (gamma_int + gamma_tr), omega - omega_r};
    return 1.0 - gamma_tr / d;
}

namespace {

// Parameters scaled as ((ω_r − ω₀)/s, γ_tr/s, γ_int/s) so all are O(1).
struct ReflectionResidual : Eigen::DenseFunctor<double> {
    std::span<const ReflectionPoint> trace;
    double w0;
    double s;

    ReflectionResidual(std::span<const ReflectionPoint> t, double w0_, double s_)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(2 * t.size())), trace(t), w0(w0_), s(s_) {}

    int operator()(const InputType& x, ValueType& f) const {
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const cplx m = reflection_model(trace[i].omega, w0 + s * x(0), s * x(1), s * x(2)) - trace[i].gamma;
            f(static_cast<Eigen::Index>(2 * i)) = m.real();
            f(static_cast<Eigen::Index>(2 * i + 1)) = m.imag();
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& jac) const {
        const double gtr = s * x(1);
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const cplx d{0.5 * s * (x(1) + x(2)), trace[i].omega - w0 - s * x(0)};
            const cplx d2 = d * d;
            const cplx j_wr = cplx{0.0, -1.0} * gtr / d2 * s;
            const cplx j_tr = (-1.0 / d + 0.5 * gtr / d2) * s;
            const cplx j_int = 0.5 * gtr / d2 * s;
            const auto r = static_cast<Eigen::Index>(2 * i);
            jac(r, 0) = j_wr.real();
            jac(r + 1, 0) = j_wr.imag();
            jac(r, 1) = j_tr.real();
            jac(r + 1, 1) = j_tr.imag();
            jac(r, 2) = j_int.real();
            jac(r + 1, 2) = j_int.imag();
        }
        return 0;
    }
};

} // namespace

ReflectionFit fit_reflection(std::span<const ReflectionPoint> trace) {
    if (trace.size() < 5) throw DomainError("fit_reflection: need at least five points");
    for (const auto& p : trace) {
        if (!std::isfinite(p.omega) || !std::isfinite(p.gamma.real()) || !std::isfinite(p.gamma.imag())) {
            throw DomainError("fit_reflection: non-finite sample");
        }
    }

    // 1/(1 − Γ) = [i(ω − ω_r) + κ/2]/γ_tr is linear in ω; weight by |1 − Γ|²
    // because the inversion amplifies noise where the response is small.
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0, swre = 0;
    for (const auto& p : trace) {
        const cplx one_minus = 1.0 - p.gamma;
        const double w = std::norm(one_minus);
        if (w == 0.0) continue;
        const cplx y = 1.0 / one_minus;
        sw += w;
        swx += w * p.omega;
        swy += w * y.imag();
        swxx += w * p.omega * p.omega;
        swxy += w * p.omega * y.imag();
        swre += w * y.real();
    }
    const double mx = swx / sw;
    const double slope = (swxy - mx * swy) / (swxx - mx * swx);
    if (!(slope > 0.0) || !std::isfinite(slope)) throw NumericError("fit_reflection: no resonance in the trace");
    double gtr = 1.0 / slope;
    double wr = mx - (swy / sw) * gtr;
    double gint = 2.0 * gtr * (swre / sw) - gtr;
    const double kappa0 = std::abs(gtr + gint);

    double lo = trace.front().omega, hi = lo;
    std::vector<double> omegas;
    for (const auto& p : trace) {
        lo = std::min(lo, p.omega);
        hi = std::max(hi, p.omega);
        omegas.push_back(p.omega);
    }
    std::sort(omegas.begin(), omegas.end());
    double max_gap = 0.0;
    for (std::size_t i = 1; i < omegas.size(); ++i) {
        if (std::abs(omegas[i] - wr) < 2.0 * kappa0) max_gap = std::max(max_gap, omegas[i] - omegas[i - 1]);
    }
    if (!(kappa0 > 0.0) || max_gap > 0.5 * kappa0 || max_gap == 0.0) {
        throw NumericError("fit_reflection: linewidth is not resolved by the frequency grid");
    }
    if (hi - lo < 5.0 * kappa0) throw DomainError("fit_reflection: trace must span at least five linewidths");

    ReflectionResidual fn(trace, wr, kappa0);
    Eigen::VectorXd x(3);
    x << 0.0, gtr / kappa0, gint / kappa0;
    Eigen::LevenbergMarquardt<ReflectionResidual> lm(fn);
    lm.setXtol(1e-15);
    lm.setFtol(1e-15);
    lm.setMaxfev(2000);
    const auto status = lm.minimize(x);
    using namespace Eigen::LevenbergMarquardtSpace;
    if (status == TooManyFunctionEvaluation || status == ImproperInputParameters || status == UserAsked) {
        throw NumericError("fit_reflection: Levenberg-Marquardt did not converge");
    }

    ReflectionFit out{wr + kappa0 * x(0), kappa0 * x(1), kappa0 * x(2), 0.0};
    double ss = 0.0;
    for (const auto& p : trace) ss += std::norm(reflection_model(p.omega, out.omega_r, out.gamma_tr, out.gamma_int) - p.gamma);
    out.residual = std::sqrt(ss / static_cast<double>(trace.size()));
    return out;
}

} // namespace qcr
