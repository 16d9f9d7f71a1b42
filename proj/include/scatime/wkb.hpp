#pragma once

// WKB phase shifts with the Langer replacement l(l+1) -> J^2, the classical
// deflection function and the single-branch semiclassical time delay and
// space shift.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "scatime/kinematics.hpp"

namespace scatime {

/// V(r) outside an optional hard core; V must be negligible beyond `range`.
struct RadialPotential {
    std::function<double(double)> V;
    double core_radius = 0.0;
    double range = 0.0;
};

inline RadialPotential free_potential() { return {[](double) { return 0.0; }, 0.0, 0.0}; }

inline RadialPotential hard_sphere_potential(double R) {
    if (!(R > 0.0)) throw DomainError("hard_sphere_potential: radius must be positive");
    return {[](double) { return 0.0; }, R, R};
}

/// V0 exp(-r^2 / a^2); negligible (1e-17 V0) beyond 6.3 a.
inline RadialPotential gaussian_potential(double V0, double a) {
    if (!(a > 0.0)) throw DomainError("gaussian_potential: width must be positive");
    return {[=](double r) { return V0 * std::exp(-(r * r) / (a * a)); }, 0.0, 6.3 * a};
}

struct WkbResult {
    double J;
    double r0;
    double delta_wkb;
    double ddelta_dE;
    double Theta;
};

namespace detail {

inline void check_potential(const RadialPotential& pot) {
    if (!pot.V) throw DomainError("RadialPotential: missing V");
    if (!(pot.core_radius >= 0.0) || !(pot.range >= 0.0)) throw DomainError("RadialPotential: negative radius");
}

// 2m(E - V) - J^2 / r^2
inline double radial_p2(const RadialPotential& pot, const Kinematics& kin, double J, double r) {
    return 2.0 * kin.mass() * (kin.energy() - pot.V(r)) - (J * J) / (r * r);
}

inline double outer_radius(const RadialPotential& pot, const Kinematics& kin, double J) {
    return 1.5 * std::max({pot.range, pot.core_radius, J / kin.k()});
}

}  // namespace detail

namespace detail {

struct TurningPoint {
    double r0;
    bool at_core;  ///< r0 is the hard-core radius rather than a root
};

inline TurningPoint find_turning_point(const RadialPotential& pot, const Kinematics& kin, double J) {
    check_potential(pot);
    if (!(J > 0.0)) throw DomainError("turning_point: J must be positive");
    auto g = [&](double r) { return radial_p2(pot, kin, J, r) * r * r; };
    const double hi = outer_radius(pot, kin, J);
    const double lo = (pot.core_radius > 0.0) ? pot.core_radius : 1e-8 * hi;
    constexpr int n = 4000;
    double r_prev = hi;
    for (int i = 1; i <= n; ++i) {
        const double r = hi + (lo - hi) * i / n;
        const double gr = g(r);
        if (gr <= 0.0) {
            double root = r;
            if (gr < 0.0) {
                // Keep the end where g > 0 so the integrands stay real on (r0, inf).
                root = boost::math::tools::bisect(g, r, r_prev, boost::math::tools::eps_tolerance<double>(52)).second;
            }
            if (root <= pot.core_radius) return {pot.core_radius, true};
            return {root, false};
        }
        r_prev = r;
    }
    if (pot.core_radius > 0.0) return {pot.core_radius, true};
    throw SolverError("turning_point: no classical turning point (attraction overcomes the centrifugal barrier)");
}

}  // namespace detail

/// Largest root of 2m(E - V) - J^2/r^2, or the core radius if that is larger.
inline double turning_point(const RadialPotential& pot, const Kinematics& kin, double J) {
    return detail::find_turning_point(pot, kin, J).r0;
}

namespace detail {

struct WkbIntegrals {
    double r0;
    double delta;
    double ddelta_dE;
};

// delta = (pi/2) J + int_{r0}^inf (p - k) dr - k r0,
// d delta/dE = int_{r0}^inf (m/p - m/k) dr - (m/k) r0,
// on r = r0 cosh u up to r_max, with the free tail beyond r_max in closed form.
inline WkbIntegrals wkb_integrals(const RadialPotential& pot, const Kinematics& kin, double J, bool with_time = true) {
    const double k = kin.k(), m = kin.mass();
    const auto tp = find_turning_point(pot, kin, J);
    const double r0 = tp.r0, V0 = pot.V(r0);
    const double g0 = tp.at_core ? radial_p2(pot, kin, J, r0) * r0 * r0 : 0.0;
    const double rmax = std::max({2.0 * r0, detail::outer_radius(pot, kin, J)});
    const double umax = std::acosh(rmax / r0);
    // p^2 r^2 as its exact excess over the value at r0, so a root at r0 stays a root.
    auto p_at = [&](double u) {
        const double sh = std::sinh(0.5 * u);
        const double dr = 2.0 * r0 * sh * sh, r = r0 + dr;
        const double excess = 2.0 * m * (kin.energy() * dr * (r + r0) - (pot.V(r) * r * r - V0 * r0 * r0));
        return std::sqrt(std::max(0.0, g0 + excess)) / r;
    };
    // p - k = (p^2 - k^2) / (p + k) with p^2 - k^2 = -2mV - J^2/r^2, free of cancellation.
    auto f_delta = [&](double u) {
        const double r = r0 * std::cosh(u);
        const double d2 = -2.0 * m * pot.V(r) - (J * J) / (r * r);
        return d2 / (p_at(u) + k) * r0 * std::sinh(u);
    };
    auto f_time = [&](double u) {
        const double p = p_at(u);
        if (p == 0.0) return 0.0;
        const double r = r0 * std::cosh(u);
        const double d2 = -2.0 * m * pot.V(r) - (J * J) / (r * r);
        return -m * d2 / (p * k * (p + k)) * r0 * std::sinh(u);
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err1 = 0.0, err2 = 0.0, l1 = 0.0, l2 = 0.0;
    const double i_delta = GK::integrate(f_delta, 0.0, umax, 15, 1e-12, &err1, &l1);
    const double i_time = with_time ? GK::integrate(f_time, 0.0, umax, 15, 1e-12, &err2, &l2) : 0.0;
    if (!(err1 <= 1e-9 * std::max(1.0, l1)) || !(err2 <= 1e-9 * std::max(1.0, l2)) || !std::isfinite(i_delta + i_time))
        throw QuadratureError("wkb: quadrature did not converge (J = " + std::to_string(J) + ", r0 = " +
                              std::to_string(r0) + ", error estimates " + std::to_string(err1) + ", " +
                              std::to_string(err2) + ")");
    // Free tail beyond rmax > J/k.
    const double s = std::sqrt(k * k * rmax * rmax - J * J);
    const double tail_delta = J * J / (s + k * rmax) - J * std::asin(J / (k * rmax));
    const double tail_time = (m / k) * (J * J / (k * k)) / (s / k + rmax);
    return {r0, 0.5 * std::numbers::pi * J + (i_delta + tail_delta) - k * r0, (i_time + tail_time) - (m / k) * r0};
}

}  // namespace detail

/// delta^WKB at continuous Langer angular momentum J.
inline double wkb_delta_at(const RadialPotential& pot, const Kinematics& kin, double J) {
    return detail::wkb_integrals(pot, kin, J, false).delta;
}

/// Theta(J) = 2 d delta / dl, centered difference at J +- 1/2 (J +- J/2 for J < 1).
inline double deflection_function(const RadialPotential& pot, const Kinematics& kin, double J) {
    if (!(J > 0.0)) throw DomainError("deflection_function: J must be positive");
    const double h = std::min(0.5, 0.5 * J);
    return (wkb_delta_at(pot, kin, J + h) - wkb_delta_at(pot, kin, J - h)) / h;
}

inline WkbResult wkb_phase_shift(const RadialPotential& pot, const Kinematics& kin, int ell) {
    if (ell < 0) throw DomainError("wkb_phase_shift: ell must be non-negative");
    const double J = ell + 0.5;
    const auto w = detail::wkb_integrals(pot, kin, J);
    return {J, w.r0, w.delta, w.ddelta_dE, deflection_function(pot, kin, J)};
}

namespace detail {

inline constexpr int kBranchGrid = 400;
inline constexpr double kUndeflected = 1e-12;

// All J with Theta(J) = sign * theta, by scanning a J grid and bisecting.
inline std::vector<Branch> find_branches(const RadialPotential& pot, const Kinematics& kin, double theta) {
    check_potential(pot);
    if (!(theta > 0.0 && theta <= std::numbers::pi)) throw DomainError("wkb: theta must lie in (0, pi]");
    const double J_hi = 1.2 * kin.k() * std::max(pot.range, pot.core_radius) + 1.0;
    const auto grid = linspace(0.5, J_hi, kBranchGrid);
    std::vector<double> Th(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Th[i] = deflection_function(pot, kin, grid[i]);
        if (std::abs(Th[i]) > std::numbers::pi) {
            throw MultiBranchError("wkb: deflection winds past pi (orbiting); not folded", {{grid[i], Th[i], 0}});
        }
    }
    std::vector<Branch> out;
    for (int sign : {+1, -1}) {
        const double target = sign * theta;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double a = Th[i] - target, b = Th[i + 1] - target;
            if (a == 0.0) {
                out.push_back({grid[i], Th[i], sign});
                continue;
            }
            if (a * b >= 0.0) continue;
            // Forward diffraction edge: brackets reaching undeflected orbits are not classical branches.
            if (std::abs(Th[i]) < kUndeflected || std::abs(Th[i + 1]) < kUndeflected) continue;
            auto f = [&](double J) { return deflection_function(pot, kin, J) - target; };
            auto [lo, hi] = boost::math::tools::bisect(f, grid[i], grid[i + 1], boost::math::tools::eps_tolerance<double>(40));
            const double J = 0.5 * (lo + hi);
            out.push_back({J, deflection_function(pot, kin, J), sign});
        }
    }
    return out;
}

inline Branch single_branch(const RadialPotential& pot, const Kinematics& kin, double theta) {
    auto branches = find_branches(pot, kin, theta);
    if (branches.size() != 1) {
        const std::string what = branches.empty() ? "wkb: no classical branch at this angle"
                                                  : "wkb: several classical branches contribute; interference not modelled";
        throw MultiBranchError(what, std::move(branches));
    }
    return branches.front();
}

}  // namespace detail

/// Every J* with theta = +-Theta(J*).
inline std::vector<Branch> classical_branches(const RadialPotential& pot, const Kinematics& kin, double theta) {
    return detail::find_branches(pot, kin, theta);
}

/// 2 d delta^WKB / dE at the single stationary J*.
inline double semiclassical_delay(const RadialPotential& pot, const Kinematics& kin, double theta) {
    const auto b = detail::single_branch(pot, kin, theta);
    return 2.0 * detail::wkb_integrals(pot, kin, b.J).ddelta_dE;
}

/// +-J*/k, signed by the branch.
inline double semiclassical_space_shift(const RadialPotential& pot, const Kinematics& kin, double theta) {
    const auto b = detail::single_branch(pot, kin, theta);
    return b.sign * b.J / kin.k();
}

}  // namespace scatime
