#pragma once

#include <stdexcept>
#include <string>

namespace tdrd {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameters (matrix data, config values, grid sizes).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A combinatorial enumeration would exceed its fixed budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation (e.g. negative W).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Matrix is numerically singular; carries the condition estimate.
class SingularError : public Error {
public:
    SingularError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Iterative method exhausted its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Floating-point overflow; carries the natural log of the magnitude that
/// could not be represented.
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, double log_magnitude)
        : Error(what), log_magnitude_(log_magnitude) {}
    double log_magnitude() const noexcept { return log_magnitude_; }

private:
    double log_magnitude_;
};

/// Two computations that must agree by an algebraic identity did not.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Field became non-finite or exceeded the blow-up threshold at time t.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double t) : Error(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

}  // namespace tdrd
