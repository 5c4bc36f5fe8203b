// quadrature.hpp: globally adaptive Gauss–Kronrod integration over breakpoint-split ranges

#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qcr::quad {

struct Result {
    double value{0.0};
    double abs_err{0.0};
    std::size_t evaluations{0};
};

struct Options {
    double abs_tol{0.0};
    double rel_tol{1e-12};
    std::size_t max_intervals{20000};
};

using Integrand = std::function<double(double)>;

/// One finite integration range with its own (possibly transformed) integrand.
struct Piece {
    Integrand f;
    double a{0.0};
    double b{0.0};
};

/// Integrates the sum of all pieces under a single global error budget.
Result integrate(std::span<const Piece> pieces, const Options& opt = {});

/// Integrates f over [points.front(), points.back()], treating every interior
/// point as a forced subdivision. The first/last entries may be -inf/+inf.
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|);
/// throws NumericError (carrying the achieved error) when the interval budget runs out.
Result integrate(const Integrand& f, std::span<const double> points, const Options& opt = {});

/// Convenience overload for a single interval.
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

} // namespace qcr::quad
