#pragma once

// One-dimensional scattering off piecewise-constant potentials: reflection and
// transmission coefficients by exact segment propagation, and the derived
// transmission and reflection delays.

#include <algorithm>
#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "scatime/kinematics.hpp"

namespace scatime {

using cplx = std::complex<double>;

/// V = 0 for x < 0, V = V0 for x > 0.
struct StepPotential {
    double V0;
};

/// values[i] on [breakpoints[i], breakpoints[i+1]], zero outside.
struct PiecewiseConstant {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

using Potential1D = std::variant<StepPotential, PiecewiseConstant>;

/// Incoming from the left with unit amplitude: e^{ikx} + R e^{-ikx} on the left,
/// T e^{iqx} on the right (q the right-hand wavenumber, or i*kappa).
struct ScatterCoefficients {
    double E;
    cplx R_coef;
    cplx T_coef;
};

inline PiecewiseConstant barrier(double V0, double a) {
    if (!(a > 0.0)) throw DomainError("barrier: width must be positive");
    return {{0.0, a}, {V0}};
}

inline void validate(const Potential1D& pot) {
    if (const auto* s = std::get_if<StepPotential>(&pot)) {
        if (!(s->V0 > 0.0) || !std::isfinite(s->V0)) throw DomainError("step potential: V0 must be positive");
        return;
    }
    const auto& p = std::get<PiecewiseConstant>(pot);
    if (p.breakpoints.size() < 2 || p.values.size() + 1 != p.breakpoints.size())
        throw DomainError("piecewise potential: need n+1 breakpoints for n values");
    for (std::size_t i = 0; i + 1 < p.breakpoints.size(); ++i)
        if (!(p.breakpoints[i] < p.breakpoints[i + 1])) throw DomainError("piecewise potential: breakpoints must increase");
    for (double b : p.breakpoints)
        if (!std::isfinite(b)) throw DomainError("piecewise potential: non-finite breakpoint");
    for (double v : p.values)
        if (!std::isfinite(v)) throw DomainError("piecewise potential: non-finite value");
}

/// Asymptotic level on the transmission side.
inline double right_level(const Potential1D& pot) {
    if (const auto* s = std::get_if<StepPotential>(&pot)) return s->V0;
    return 0.0;
}

inline double max_level(const Potential1D& pot) {
    if (const auto* s = std::get_if<StepPotential>(&pot)) return s->V0;
    const auto& v = std::get<PiecewiseConstant>(pot).values;
    return std::max(0.0, *std::max_element(v.begin(), v.end()));
}

namespace detail {

struct WaveState {
    cplx psi;
    cplx dpsi;
};

// Carry (psi, psi') from x to x - d through a region of constant potential V.
inline WaveState propagate_back(WaveState s, double V, double d, const Kinematics& kin) {
    const double w = 2.0 * kin.mass() * (kin.energy() - V);
    if (w > 0.0) {
        const double kk = std::sqrt(w), c = std::cos(kk * d), sn = std::sin(kk * d);
        const double sinc = (kk * d < 1e-8) ? d : sn / kk;
        return {s.psi * c - s.dpsi * sinc, s.psi * (kk * sn) + s.dpsi * c};
    }
    if (w < 0.0) {
        const double kappa = std::sqrt(-w), c = std::cosh(kappa * d), sh = std::sinh(kappa * d);
        const double sinhc = (kappa * d < 1e-8) ? d : sh / kappa;
        return {s.psi * c - s.dpsi * sinhc, -s.psi * (kappa * sh) + s.dpsi * c};
    }
    return {s.psi - s.dpsi * d, s.dpsi};  // E on the segment level: psi = a + b x
}

// Match (psi, psi') at x0 onto e^{ikx} A + B e^{-ikx}; returns R = B/A, T = 1/A.
inline ScatterCoefficients match_left(WaveState s, double x0, const Kinematics& kin) {
    const double k = kin.k();
    const cplx i(0.0, 1.0);
    const cplx A = 0.5 * (s.psi + s.dpsi / (i * k)) * std::exp(-i * (k * x0));
    const cplx B = 0.5 * (s.psi - s.dpsi / (i * k)) * std::exp(i * (k * x0));
    if (std::abs(A) == 0.0 || !std::isfinite(std::abs(A))) throw CoefficientNodeError("transfer: transmission underflow");
    return {kin.energy(), B / A, 1.0 / A};
}

}  // namespace detail

inline ScatterCoefficients transfer_coefficients(const Potential1D& pot, const Kinematics& kin) {
    validate(pot);
    const cplx i(0.0, 1.0);
    if (const auto* s = std::get_if<StepPotential>(&pot)) {
        // T e^{iqx} (or T e^{-kappa x}) at x = 0.
        const double w = 2.0 * kin.mass() * (kin.energy() - s->V0);
        const cplx q = (w >= 0.0) ? cplx(std::sqrt(w), 0.0) : i * std::sqrt(-w);
        const double k = kin.k();
        return {kin.energy(), (k - q) / (k + q), 2.0 * k / (k + q)};
    }
    const auto& p = std::get<PiecewiseConstant>(pot);
    const double k = kin.k(), xr = p.breakpoints.back();
    detail::WaveState s{std::exp(i * (k * xr)), i * k * std::exp(i * (k * xr))};
    for (std::size_t seg = p.values.size(); seg-- > 0;)
        s = detail::propagate_back(s, p.values[seg], p.breakpoints[seg + 1] - p.breakpoints[seg], kin);
    return detail::match_left(s, p.breakpoints.front(), kin);
}

/// Probability flux carried by R and T relative to the incoming flux; 1 when conserved.
inline double flux_balance(const Potential1D& pot, const ScatterCoefficients& c, const Kinematics& kin) {
    const double w = 2.0 * kin.mass() * (kin.energy() - right_level(pot));
    const double transmitted = (w > 0.0) ? std::sqrt(w) / kin.k() * std::norm(c.T_coef) : 0.0;
    return std::norm(c.R_coef) + transmitted;
}

/// d/dE arg T by fourth-order differences of the branch-continued phase.
inline double transmission_delay(const Potential1D& pot, const Kinematics& kin) {
    validate(pot);
    const double floor_level = std::max(0.0, right_level(pot));
    const double E = kin.energy(), m = kin.mass();
    if (!(E > floor_level)) throw DomainError("transmission_delay: energy below the transmission-side level");
    const auto centre = transfer_coefficients(pot, kin);
    if (std::abs(centre.T_coef) < 1e-12) throw CoefficientNodeError("transmission_delay: |T| below 1e-12");
    const double h = std::min(fd_step(E), 0.1 * (E - floor_level));
    const double ref = std::arg(centre.T_coef);
    auto phase = [&](double e) {
        return nearest_branch(std::arg(transfer_coefficients(pot, Kinematics::from_energy(e, m)).T_coef), ref);
    };
    return central_derivative(phase, E, h);
}

/// (m/k) 2D + d/dE arg R for total reflection off a step of height V0 > E.
inline double reflection_delay_semiinfinite_step(double V0, const Kinematics& kin, double D) {
    const double E = kin.energy(), m = kin.mass();
    if (!(V0 > 0.0)) throw DomainError("reflection delay: V0 must be positive");
    if (!(E < V0)) throw DomainError("reflection delay: requires E < V0");
    const StepPotential step{V0};
    const double h = std::min(fd_step(E), 0.1 * std::min(E, V0 - E));
    const double ref = std::arg(transfer_coefficients(step, kin).R_coef);
    auto phase = [&](double e) {
        return nearest_branch(std::arg(transfer_coefficients(step, Kinematics::from_energy(e, m)).R_coef), ref);
    };
    return 2.0 * D / kin.velocity() + central_derivative(phase, E, h);
}

/// Closed form of the excess reflection delay, (m/k)(2/q).
inline double step_reflection_excess(double V0, const Kinematics& kin) {
    if (!(kin.energy() < V0)) throw DomainError("step_reflection_excess: requires E < V0");
    const double q = std::sqrt(2.0 * kin.mass() * (V0 - kin.energy()));
    return 2.0 / (kin.velocity() * q);
}

}  // namespace scatime
