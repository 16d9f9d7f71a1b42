#pragma once

// Hard-sphere phase shifts, the point-scatterer reference model and the
// classical hard-sphere formulas.

#include <cmath>
#include <numbers>

#include "scatime/kinematics.hpp"
#include "scatime/partialwave.hpp"
#include "scatime/specfun.hpp"

namespace scatime {

namespace detail {

// Continuous branch of arctan(j/n): pinned by delta_l(0+) = 0, so that
// delta_0 = -kR. The integer multiple of pi is taken from the Debye phase
// of the Riccati-Bessel functions, which is accurate to well within pi/2.
inline double hs_delta_from(const BesselTable& bessel, int ell) {
    if (bessel.saturated(ell)) return 0.0;
    const double x = bessel.x();
    const double principal = std::atan(bessel.j(ell) / bessel.n(ell));
    const double J = ell + 0.5;
    double approx = 0.0;
    if (x > J) approx = -(std::sqrt(x * x - J * J) - J * std::acos(J / x) + std::numbers::pi / 4.0);
    const double turns = std::round((approx - principal) / std::numbers::pi);
    return principal + turns * std::numbers::pi;
}

/// d delta_l / dx = -1 / (x^2 (j_l^2 + n_l^2)).
inline double hs_ddelta_dx_from(const BesselTable& bessel, int ell) {
    if (bessel.saturated(ell)) return 0.0;
    const double x = bessel.x();
    const double j = bessel.j(ell), n = bessel.n(ell);
    return -1.0 / (x * x * (j * j + n * n));
}

inline void check_radius(double R) {
    if (!(R > 0.0)) throw DomainError("hard sphere radius must be positive");
}

}  // namespace detail

inline double hs_delta(double R, int ell, const Kinematics& kin) {
    detail::check_radius(R);
    if (ell < 0) throw DomainError("hs_delta: ell must be non-negative");
    return detail::hs_delta_from(BesselTable(ell, kin.k() * R), ell);
}

inline double hs_ddelta_dE(double R, int ell, const Kinematics& kin) {
    detail::check_radius(R);
    if (ell < 0) throw DomainError("hs_ddelta_dE: ell must be non-negative");
    // dx/dE = R dk/dE = R m / k
    return R / kin.velocity() * detail::hs_ddelta_dx_from(BesselTable(ell, kin.k() * R), ell);
}

/// Classical delay relative to a point scatterer, -(m/k) 2R sin(theta/2).
inline double classical_delay(double R, const Kinematics& kin, double theta) {
    detail::check_radius(R);
    detail::check_angle(theta);
    return -2.0 * R * std::sin(theta / 2.0) / kin.velocity();
}

/// Classical space shift R cos(theta/2).
inline double classical_space_shift(double R, double theta) {
    detail::check_radius(R);
    detail::check_angle(theta);
    return R * std::cos(theta / 2.0);
}

/// Hard-sphere deflection angle at impact parameter b; zero for a miss.
inline double classical_deflection(double R, double impact_b, const Kinematics& /*kin*/) {
    detail::check_radius(R);
    if (!(impact_b >= 0.0)) throw DomainError("classical_deflection: impact parameter must be >= 0");
    if (impact_b >= R) return 0.0;
    return std::numbers::pi - 2.0 * std::asin(impact_b / R);
}

class HardSphere {
public:
    explicit HardSphere(double radius) : radius_(radius) { detail::check_radius(radius); }

    double radius() const noexcept { return radius_; }
    double length_scale() const noexcept { return radius_; }

    double delta(int ell, const Kinematics& kin) const { return hs_delta(radius_, ell, kin); }
    double ddelta_dE(int ell, const Kinematics& kin) const { return hs_ddelta_dE(radius_, ell, kin); }

    /// ceil(kR + 10 (kR)^(1/3) + 10)
    int suggested_ellmax(const Kinematics& kin) const {
        const double x = kin.k() * radius_;
        return static_cast<int>(std::ceil(x + 10.0 * std::cbrt(x) + 10.0));
    }

    /// All orders from one Bessel recurrence.
    PhaseShiftTable table(const Kinematics& kin, int ellmax) const {
        const BesselTable bessel(ellmax, kin.k() * radius_);
        PhaseShiftTable t;
        t.kin = kin;
        t.length_scale = radius_;
        t.delta.resize(static_cast<std::size_t>(ellmax) + 1);
        t.ddelta_dE.resize(static_cast<std::size_t>(ellmax) + 1);
        const double dx_dE = radius_ / kin.velocity();
        for (int l = 0; l <= ellmax; ++l) {
            t.delta[l] = detail::hs_delta_from(bessel, l);
            t.ddelta_dE[l] = dx_dE * detail::hs_ddelta_dx_from(bessel, l);
        }
        return t;
    }

    double classical_delay(const Kinematics& kin, double theta) const {
        return scatime::classical_delay(radius_, kin, theta);
    }
    double classical_space_shift(double theta) const { return scatime::classical_space_shift(radius_, theta); }

private:
    double radius_;
};

/// R -> 0 limit of the hard sphere: the reference dynamics. All phase shifts
/// and all delays vanish.
class PointScatterer {
public:
    static constexpr bool is_point_reference = true;

    double length_scale() const noexcept { return 1.0; }
    double delta(int /*ell*/, const Kinematics& /*kin*/) const { return 0.0; }
    double ddelta_dE(int /*ell*/, const Kinematics& /*kin*/) const { return 0.0; }
    int suggested_ellmax(const Kinematics& /*kin*/) const { return 0; }
};

static_assert(PhaseShiftModel<HardSphere>);
static_assert(PointReference<PointScatterer>);
static_assert(!PointReference<HardSphere>);

}  // namespace scatime
