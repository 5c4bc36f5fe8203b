// errors.hpp: exception types shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace qcr {

/// Input outside an operation's domain (bad parameters, violated preconditions).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance or hit a degenerate case.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, double achieved = 0.0)
        : std::runtime_error(what), achieved_(achieved) {}

    /// Tolerance or residual actually reached, when meaningful.
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

} // namespace qcr
