#pragma once

// Units (hbar = 1), kinematic conversions and the finite-difference helpers
// shared by every module.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "scatime/errors.hpp"

namespace scatime {

inline constexpr const char* kVersion = "0.1.0";

inline double energy_from_k(double k, double mass) {
    if (!(k > 0.0) || !(mass > 0.0))
        throw DomainError("energy_from_k: k and mass must be positive");
    return k * k / (2.0 * mass);
}

inline double k_from_energy(double energy, double mass) {
    if (!(energy > 0.0) || !(mass > 0.0))
        throw DomainError("k_from_energy: energy and mass must be positive");
    return std::sqrt(2.0 * mass * energy);
}

/// Mass, wavenumber and energy of a scattering state, E = k^2 / 2m.
class Kinematics {
public:
    static Kinematics from_k(double k, double mass = 1.0) { return Kinematics(k, mass); }
    static Kinematics from_energy(double energy, double mass = 1.0) {
        return Kinematics(k_from_energy(energy, mass), mass);
    }

    double mass() const noexcept { return mass_; }
    double k() const noexcept { return k_; }
    double energy() const noexcept { return energy_; }
    /// dE/dk = k/m; converts k-derivatives into E-derivatives.
    double velocity() const noexcept { return k_ / mass_; }

private:
    Kinematics(double k, double mass) : mass_(mass), k_(k), energy_(energy_from_k(k, mass)) {}

    double mass_;
    double k_;
    double energy_;
};

/// Dimensionless mode used by the CLI: lengths in units of R, times in m R^2.
struct UnitSystem {
    double mass_unit = 1.0;
    double length_unit = 1.0;

    double time_unit() const { return mass_unit * length_unit * length_unit; }
    std::string describe() const {
        return "hbar = 1, m = " + std::to_string(mass_unit) + ", R = " + std::to_string(length_unit) +
               "; lengths in R, times in m*R^2, energies in 1/(m*R^2)";
    }
};

/// Step used for validation derivatives: 1e-5 * max(1, |x|).
inline double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

/// Fourth-order central difference (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h.
template <class F>
double central_derivative(F&& f, double x, double h) {
    if (!(h > 0.0)) throw DomainError("central_derivative: step must be positive");
    return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

template <class F>
double central_derivative(F&& f, double x) {
    return central_derivative(std::forward<F>(f), x, fd_step(x));
}

/// Shift `phase` by a multiple of 2pi so that it lies within pi of `reference`.
inline double nearest_branch(double phase, double reference) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return phase - two_pi * std::round((phase - reference) / two_pi);
}

/// Unwrap a sampled phase in place so successive samples differ by at most pi.
inline void unwrap_phase(std::span<double> phase) {
    for (std::size_t i = 1; i < phase.size(); ++i) phase[i] = nearest_branch(phase[i], phase[i - 1]);
}

inline std::vector<double> unwrapped(std::vector<double> phase) {
    unwrap_phase(phase);
    return phase;
}

/// n evenly spaced points on [a, b] (inclusive); n == 1 yields {a}.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + step * static_cast<double>(i);
    if (n > 1) out.back() = b;
    return out;
}

}  // namespace scatime
