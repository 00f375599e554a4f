#pragma once

#include <stdexcept>
#include <string>

namespace unicone {

/// Thrown when a caller violates a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative routine fails to converge within its budget.
/// Carries the last residual so callers can decide how bad things are.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Thrown when an exhaustive enumeration would exceed its subset budget.
class GuardExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a null-space sample is requested from a trivial null space.
class EmptyNullSpace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace unicone
