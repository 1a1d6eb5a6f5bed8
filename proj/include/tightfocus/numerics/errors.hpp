#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace tightfocus::numerics {

/// Base class for failures of a numerical procedure (as opposed to invalid
/// input, which is reported with std::invalid_argument / std::domain_error).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative or adaptive method ran out of budget before meeting its
/// tolerance. Carries the best estimate obtained so far and its error bound.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, std::complex<double> estimate, double error_bound)
        : NumericError(what), estimate_(estimate), error_bound_(error_bound) {}

    std::complex<double> estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    std::complex<double> estimate_;
    double error_bound_;
};

}  // namespace tightfocus::numerics
