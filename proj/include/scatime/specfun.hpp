#pragma once

// Spherical Bessel functions j_l, n_l and Legendre polynomials P_l(cos theta)
// with their derivatives, stable up to l ~ 1e5 at double precision.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "scatime/errors.hpp"

namespace scatime {

inline constexpr int kMaxBesselOrder = 100000;
/// |n_l| beyond this is reported as saturated rather than risking overflow.
inline constexpr double kBesselSaturation = 1e280;

struct BesselPair {
    int ell = 0;
    double x = 0.0;
    double j = 0.0;
    double n = 0.0;
    double jprime = 0.0;  ///< d j_l / dx
    double nprime = 0.0;  ///< d n_l / dx
    /// n_l overflowed; j, n and derivatives are not meaningful beyond "j/n ~ 0".
    bool saturated = false;
};

/// j_l(x), n_l(x) and x-derivatives for l = 0..ellmax at a single argument.
class BesselTable {
public:
    BesselTable(int ellmax, double x) : ellmax_(ellmax), x_(x) {
        if (!(x > 0.0)) throw DomainError("spherical_bessel: x must be positive");
        if (ellmax < 0 || ellmax > kMaxBesselOrder)
            throw DomainError("spherical_bessel: order out of range [0, 100000]");
        const int top = std::max(ellmax, 1);
        fill_j(top);
        fill_n(top);
    }

    int ellmax() const noexcept { return ellmax_; }
    double x() const noexcept { return x_; }
    /// First order whose n_l saturated (ellmax + 1 when none did).
    int saturated_from() const noexcept { return saturated_from_; }
    bool saturated(int ell) const noexcept { return ell >= saturated_from_; }

    double j(int ell) const { return j_[static_cast<std::size_t>(ell)]; }
    double n(int ell) const { return n_[static_cast<std::size_t>(ell)]; }

    double jprime(int ell) const {
        if (ell == 0) return -j_[1];
        return j_[ell - 1] - (ell + 1) / x_ * j_[ell];
    }
    double nprime(int ell) const {
        if (ell == 0) return -n_[1];
        return n_[ell - 1] - (ell + 1) / x_ * n_[ell];
    }

    BesselPair pair(int ell) const {
        BesselPair p;
        p.ell = ell;
        p.x = x_;
        p.saturated = saturated(ell);
        p.j = j(ell);
        if (p.saturated) {
            p.n = -HUGE_VAL;
            p.nprime = HUGE_VAL;
            p.jprime = std::isfinite(jprime(ell)) ? jprime(ell) : 0.0;
        } else {
            p.n = n(ell);
            p.jprime = jprime(ell);
            p.nprime = nprime(ell);
        }
        return p;
    }

private:
    // Miller start order. The minimal solution must have decayed by ~e^-40
    // relative to the dominant one between x and the start order.
    static int miller_start(int top, double x) {
        int start = top + std::max(20, static_cast<int>(std::ceil(10.0 * std::log(top + 10.0))));
        auto decay = [x](double order) {
            if (order <= x) return 0.0;
            return order * std::acosh(order / x) - std::sqrt(order * order - x * x);
        };
        const int stride = std::max(1, static_cast<int>(std::ceil(std::cbrt(x))));
        while (decay(start) < 20.0) start += stride;
        return start;
    }

    void fill_j(int top) {
        const double x = x_;
        j_.assign(static_cast<std::size_t>(top) + 2, 0.0);
        const double s = std::sin(x), c = std::cos(x);
        const double j0 = s / x;
        const double j1 = s / (x * x) - c / x;
        if (x > top + 1.0) {
            // Oscillatory region for every order: upward recurrence is stable.
            j_[0] = j0;
            j_[1] = j1;
            for (int l = 1; l <= top; ++l) j_[l + 1] = (2 * l + 1) / x * j_[l] - j_[l - 1];
            return;
        }
        const int start = miller_start(top + 1, x);
        // f_{l-1} = (2l+1)/x f_l - f_{l+1}, seeded with f_{start+1} = 0.
        double upper = 0.0, current = 1e-300;
        for (int l = start; l > 0; --l) {
            const double lower = (2 * l + 1) / x * current - upper;
            upper = current;
            current = lower;
            if (l - 1 <= top + 1) j_[l - 1] = current;
            if (std::abs(current) > 1e250) {
                current *= 1e-250;
                upper *= 1e-250;
                for (int m = l - 1; m <= top + 1; ++m) j_[m] *= 1e-250;
            }
        }
        // Normalize against whichever closed form is better conditioned.
        const double scale =
            (x < 1.0 || std::abs(j0) >= std::abs(j1)) ? j0 / j_[0] : j1 / j_[1];
        for (auto& v : j_) v *= scale;
    }

    void fill_n(int top) {
        const double x = x_;
        n_.assign(static_cast<std::size_t>(top) + 2, 0.0);
        const double s = std::sin(x), c = std::cos(x);
        n_[0] = -c / x;
        n_[1] = -c / (x * x) - s / x;
        saturated_from_ = ellmax_ + 1;
        for (int l = 0; l <= top + 1; ++l) {
            if (l >= 2) n_[l] = (2 * l - 1) / x * n_[l - 1] - n_[l - 2];
            if (!(std::abs(n_[l]) <= kBesselSaturation)) {
                saturated_from_ = std::min(saturated_from_, l);
                for (int m = l; m <= top + 1; ++m) n_[m] = -HUGE_VAL;
                break;
            }
        }
        // n'_l uses n_{l-1}; the derivative at ellmax is still fine if only
        // ellmax + 1 overflowed.
        if (saturated_from_ > ellmax_) saturated_from_ = ellmax_ + 1;
    }

    int ellmax_;
    double x_;
    int saturated_from_ = 0;
    std::vector<double> j_;
    std::vector<double> n_;
};

inline BesselPair spherical_bessel(int ell, double x) {
    if (ell < 0 || ell > kMaxBesselOrder)
        throw DomainError("spherical_bessel: order out of range [0, 100000]");
    return BesselTable(ell, x).pair(ell);
}

struct LegendreSequence {
    double x = 1.0;
    std::vector<double> values;  ///< P_0(x) .. P_ellmax(x)
};

/// (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}.
inline LegendreSequence legendre_all(int ellmax, double costheta) {
    if (ellmax < 0) throw DomainError("legendre_all: ellmax must be non-negative");
    if (!(std::abs(costheta) <= 1.0)) throw DomainError("legendre_all: |cos theta| must be <= 1");
    LegendreSequence seq;
    seq.x = costheta;
    seq.values.resize(static_cast<std::size_t>(ellmax) + 1);
    seq.values[0] = 1.0;
    if (ellmax >= 1) seq.values[1] = costheta;
    for (int l = 1; l < ellmax; ++l)
        seq.values[l + 1] = ((2 * l + 1) * costheta * seq.values[l] - l * seq.values[l - 1]) / (l + 1);
    return seq;
}

/// d/dtheta P_l(cos theta) for l = 0..ellmax. At theta = 0 or pi every entry is 0.
inline std::vector<double> legendre_theta_derivative_all(int ellmax, double theta) {
    std::vector<double> out(static_cast<std::size_t>(ellmax) + 1, 0.0);
    if (theta == 0.0 || theta == std::numbers::pi) return out;
    const double c = std::cos(theta), s = std::sin(theta);
    const auto p = legendre_all(ellmax + 1, c).values;
    for (int l = 0; l <= ellmax; ++l) out[l] = (l + 1) * (p[l + 1] - c * p[l]) / s;
    return out;
}

inline double legendre_theta_derivative(int ell, double theta) {
    if (ell < 0) throw DomainError("legendre_theta_derivative: ell must be non-negative");
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw DomainError("legendre_theta_derivative: theta must lie in (0, pi)");
    const double c = std::cos(theta);
    const auto p = legendre_all(ell + 1, c).values;
    return (ell + 1) * (p[ell + 1] - c * p[ell]) / std::sin(theta);
}

/// Large-l form 2 / sqrt(2 pi l sin theta) * cos((l + 1/2) theta - pi/4).
inline double legendre_asymptotic(int ell, double theta) {
    if (ell < 1) throw DomainError("legendre_asymptotic: ell must be >= 1");
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw DomainError("legendre_asymptotic: theta must lie in (0, pi)");
    const double J = ell + 0.5;
    return 2.0 / std::sqrt(2.0 * std::numbers::pi * ell * std::sin(theta)) *
           std::cos(J * theta - std::numbers::pi / 4.0);
}

}  // namespace scatime
