#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scatime {

/// Invalid argument outside an operation's domain (non-positive k, theta = 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Base class for failures of a numerical procedure on valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |A| fell below the node threshold, so arg A and its derivatives are indeterminate.
class AmplitudeNodeError : public NumericalError {
public:
    explicit AmplitudeNodeError(double theta)
        : NumericalError("indeterminate at amplitude node (theta = " + std::to_string(theta) + ")"),
          theta_(theta) {}
    double theta() const noexcept { return theta_; }

private:
    double theta_;
};

class NoPeakError : public NumericalError {
public:
    NoPeakError() : NumericalError("no peak found") {}
};

/// Transmission (or other) coefficient is numerically zero.
class CoefficientNodeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class HermiticityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// One stationary angular momentum of the semiclassical sums.
struct Branch {
    double J;      ///< Langer angular momentum l + 1/2
    double Theta;  ///< continuous deflection angle at J
    int sign;      ///< +1 for theta = +Theta, -1 for theta = -Theta
};

/// Zero, several, or winding classical branches contribute to a scattering angle.
class MultiBranchError : public NumericalError {
public:
    MultiBranchError(const std::string& what, std::vector<Branch> branches)
        : NumericalError(what), branches_(std::move(branches)) {}
    const std::vector<Branch>& branches() const noexcept { return branches_; }

private:
    std::vector<Branch> branches_;
};

}  // namespace scatime
