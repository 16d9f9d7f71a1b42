#pragma once

// Scattering amplitude, cross sections, angular time delay, space shift and
// Eisenbud-Wigner delays assembled from an arbitrary phase-shift model.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "scatime/errors.hpp"
#include "scatime/kinematics.hpp"
#include "scatime/specfun.hpp"

namespace scatime {

/// A phase-shift provider. delta is in radians, ddelta_dE in radians per energy.
/// length_scale() sets the amplitude-node threshold.
template <class M>
concept PhaseShiftModel = requires(const M& model, int ell, const Kinematics& kin) {
    { model.delta(ell, kin) } -> std::convertible_to<double>;
    { model.ddelta_dE(ell, kin) } -> std::convertible_to<double>;
    { model.suggested_ellmax(kin) } -> std::convertible_to<int>;
    { model.length_scale() } -> std::convertible_to<double>;
};

/// Models standing for the point-scatterer reference dynamics. Their angular
/// time delay and space shift vanish identically.
template <class M>
concept PointReference = PhaseShiftModel<M> && M::is_point_reference;

template <class M>
concept HasClassicalReference = requires(const M& model, const Kinematics& kin, double theta) {
    { model.classical_delay(kin, theta) } -> std::convertible_to<double>;
    { model.classical_space_shift(theta) } -> std::convertible_to<double>;
};

/// delta_l and d delta_l / dE for l = 0..ellmax at one energy.
struct PhaseShiftTable {
    Kinematics kin = Kinematics::from_k(1.0);
    double length_scale = 1.0;
    std::vector<double> delta;
    std::vector<double> ddelta_dE;

    int ellmax() const noexcept { return static_cast<int>(delta.size()) - 1; }
};

template <PhaseShiftModel M>
PhaseShiftTable phase_shift_table(const M& model, const Kinematics& kin, int ellmax) {
    if (ellmax < 0) throw DomainError("phase_shift_table: ellmax must be non-negative");
    if constexpr (requires { { model.table(kin, ellmax) } -> std::same_as<PhaseShiftTable>; }) {
        return model.table(kin, ellmax);
    } else {
        PhaseShiftTable t;
        t.kin = kin;
        t.length_scale = model.length_scale();
        t.delta.resize(static_cast<std::size_t>(ellmax) + 1);
        t.ddelta_dE.resize(static_cast<std::size_t>(ellmax) + 1);
        for (int l = 0; l <= ellmax; ++l) {
            t.delta[l] = model.delta(l, kin);
            t.ddelta_dE[l] = model.ddelta_dE(l, kin);
        }
        return t;
    }
}

struct AmplitudeSample {
    double theta = 0.0;
    double A_re = 0.0;
    double A_im = 0.0;
    double dsigma_dOmega = 0.0;
    double argA = 0.0;  ///< principal value in (-pi, pi]

    std::complex<double> value() const { return {A_re, A_im}; }
};

namespace detail {

inline void check_angle(double theta) {
    if (!(theta > 0.0 && theta <= std::numbers::pi))
        throw DomainError("scattering angle must lie in (0, pi]");
}

/// Partial-wave sums at one angle. A uses the sin(delta) e^{i delta} form,
/// which converges under an l cutoff.
struct AngularSums {
    std::complex<double> A;
    std::complex<double> dA_dtheta;
    /// sum (2l+1) d_E delta_l e^{2i delta_l} P_l
    std::complex<double> delay_numerator;
};

inline AngularSums angular_sums(const PhaseShiftTable& table, double theta, bool want_theta_derivative) {
    const int L = table.ellmax();
    const double c = std::cos(theta);
    const auto p = legendre_all(L, c).values;
    std::vector<double> dp;
    if (want_theta_derivative) dp = legendre_theta_derivative_all(L, theta);
    AngularSums s{};
    const double k = table.kin.k();
    for (int l = 0; l <= L; ++l) {
        const double d = table.delta[l];
        const std::complex<double> e1 = std::polar(1.0, d);
        const std::complex<double> partial = (2.0 * l + 1.0) * std::sin(d) * e1 / k;
        s.A += partial * p[l];
        if (want_theta_derivative) s.dA_dtheta += partial * dp[l];
        s.delay_numerator += (2.0 * l + 1.0) * table.ddelta_dE[l] * (e1 * e1) * p[l];
    }
    return s;
}

inline bool is_node(const PhaseShiftTable& table, std::complex<double> A) {
    return std::abs(A) < 1e-13 * table.length_scale;
}

}  // namespace detail

inline AmplitudeSample amplitude(const PhaseShiftTable& table, double theta) {
    detail::check_angle(theta);
    const auto s = detail::angular_sums(table, theta, false);
    AmplitudeSample out;
    out.theta = theta;
    out.A_re = s.A.real();
    out.A_im = s.A.imag();
    out.dsigma_dOmega = out.A_re * out.A_re + out.A_im * out.A_im;
    out.argA = std::atan2(out.A_im, out.A_re);
    return out;
}

template <PhaseShiftModel M>
AmplitudeSample amplitude(const M& model, const Kinematics& kin, double theta, int ellmax) {
    return amplitude(phase_shift_table(model, kin, ellmax), theta);
}

/// d_E arg A via 2 Re[sum (2l+1) d_E delta_l e^{2i delta_l} P_l / (2ik A)].
inline double angular_time_delay(const PhaseShiftTable& table, double theta) {
    detail::check_angle(theta);
    const auto s = detail::angular_sums(table, theta, false);
    if (detail::is_node(table, s.A)) throw AmplitudeNodeError(theta);
    const std::complex<double> denom = std::complex<double>(0.0, 2.0 * table.kin.k()) * s.A;
    return 2.0 * (s.delay_numerator / denom).real();
}

template <PhaseShiftModel M>
double angular_time_delay(const M& model, const Kinematics& kin, double theta, int ellmax) {
    if constexpr (PointReference<M>) {
        detail::check_angle(theta);
        return 0.0;
    } else {
        return angular_time_delay(phase_shift_table(model, kin, ellmax), theta);
    }
}

/// Signed space shift b = -(1/k) Im(d_theta A / A).
inline double space_shift(const PhaseShiftTable& table, double theta) {
    detail::check_angle(theta);
    const auto s = detail::angular_sums(table, theta, true);
    if (detail::is_node(table, s.A)) throw AmplitudeNodeError(theta);
    return -(s.dA_dtheta / s.A).imag() / table.kin.k();
}

template <PhaseShiftModel M>
double space_shift(const M& model, const Kinematics& kin, double theta, int ellmax) {
    if constexpr (PointReference<M>) {
        detail::check_angle(theta);
        return 0.0;
    } else {
        return space_shift(phase_shift_table(model, kin, ellmax), theta);
    }
}

/// Partial-wave delay 2 d_E delta_l.
template <PhaseShiftModel M>
double eisenbud_wigner_delay(const M& model, const Kinematics& kin, int ell) {
    if (ell < 0) throw DomainError("eisenbud_wigner_delay: ell must be non-negative");
    return 2.0 * model.ddelta_dE(ell, kin);
}

/// Delay at theta referenced to a detector at theta0.
template <PhaseShiftModel M>
double relative_delay(const M& model, const Kinematics& kin, double theta, double theta0, int ellmax) {
    if constexpr (PointReference<M>) {
        detail::check_angle(theta);
        detail::check_angle(theta0);
        return 0.0;
    } else {
        const auto table = phase_shift_table(model, kin, ellmax);
        return angular_time_delay(table, theta) - angular_time_delay(table, theta0);
    }
}

/// sigma = 4 pi / k^2 sum (2l+1) sin^2 delta_l.
inline double total_cross_section(const PhaseShiftTable& table) {
    double sum = 0.0;
    for (int l = 0; l <= table.ellmax(); ++l) {
        const double s = std::sin(table.delta[l]);
        sum += (2.0 * l + 1.0) * s * s;
    }
    const double k = table.kin.k();
    return 4.0 * std::numbers::pi / (k * k) * sum;
}

struct DelayRow {
    double theta = 0.0;
    double t_delay = 0.0;  ///< NaN at amplitude nodes
    double b = 0.0;        ///< NaN at amplitude nodes
    double dsigma_dOmega = 0.0;
    double t_class = 0.0;  ///< NaN when the model has no classical reference
    double b_class = 0.0;
};

struct DelayProfile {
    Kinematics kin = Kinematics::from_k(1.0);
    std::vector<DelayRow> rows;
};

/// Scan t_delay, b and dsigma/dOmega over a strictly increasing theta grid.
template <PhaseShiftModel M>
DelayProfile delay_profile_scan(const M& model, const Kinematics& kin, std::span<const double> theta_grid,
                                int ellmax) {
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        detail::check_angle(theta_grid[i]);
        if (i > 0 && !(theta_grid[i] > theta_grid[i - 1]))
            throw DomainError("delay_profile_scan: theta grid must be strictly increasing");
    }
    DelayProfile profile;
    profile.kin = kin;
    if (theta_grid.empty()) return profile;
    const auto table = phase_shift_table(model, kin, ellmax);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    profile.rows.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        DelayRow row;
        row.theta = theta;
        const auto s = detail::angular_sums(table, theta, true);
        row.dsigma_dOmega = std::norm(s.A);
        if constexpr (PointReference<M>) {
            row.t_delay = 0.0;
            row.b = 0.0;
        } else if (detail::is_node(table, s.A)) {
            row.t_delay = nan;
            row.b = nan;
        } else {
            const std::complex<double> denom = std::complex<double>(0.0, 2.0 * kin.k()) * s.A;
            row.t_delay = 2.0 * (s.delay_numerator / denom).real();
            row.b = -(s.dA_dtheta / s.A).imag() / kin.k();
        }
        if constexpr (HasClassicalReference<M>) {
            row.t_class = model.classical_delay(kin, theta);
            row.b_class = model.classical_space_shift(theta);
        } else {
            row.t_class = nan;
            row.b_class = nan;
        }
        profile.rows.push_back(row);
    }
    return profile;
}

struct EnergyRow {
    double k = 0.0;
    double energy = 0.0;
    double t_delay = 0.0;  ///< NaN at amplitude nodes
    double b = 0.0;        ///< NaN at amplitude nodes
};

/// t_delay and b at fixed theta over a k grid, each with the model's suggested cutoff.
template <PhaseShiftModel M>
std::vector<EnergyRow> energy_profile_scan(const M& model, double theta, std::span<const double> k_grid,
                                           double mass = 1.0) {
    detail::check_angle(theta);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<EnergyRow> rows;
    rows.reserve(k_grid.size());
    for (double k : k_grid) {
        const auto kin = Kinematics::from_k(k, mass);
        EnergyRow row{k, kin.energy(), nan, nan};
        const auto table = phase_shift_table(model, kin, model.suggested_ellmax(kin));
        try {
            row.t_delay = angular_time_delay(table, theta);
            row.b = space_shift(table, theta);
        } catch (const AmplitudeNodeError&) {
        }
        rows.push_back(row);
    }
    return rows;
}

enum class ProfileColumn { t_delay, b };
enum class PeakSense { maximum, minimum };

struct Peak {
    double theta_star = 0.0;  ///< abscissa of the refined extremum
    double height = 0.0;      ///< refined extremal value
    double half_width = 0.0;  ///< full width at half height above the baseline
    double baseline = 0.0;    ///< mean of the two adjacent opposite extrema
};

/// Most pronounced interior extremum of y(x) with x in [lo, hi]. The width is
/// measured at half the height above the mean of the adjacent opposite
/// extrema (the neighbouring minima of a maximum, and vice versa).
inline Peak find_peak_xy(std::span<const double> x, std::span<const double> y, double lo, double hi,
                         PeakSense sense) {
    if (x.size() != y.size()) throw DomainError("find_peak: x and y differ in length");
    const double sgn = sense == PeakSense::maximum ? 1.0 : -1.0;
    auto v = [&](std::size_t i) { return sgn * y[i]; };
    auto usable = [&](std::size_t i) { return std::isfinite(y[i]); };

    std::optional<std::size_t> best;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        if (!usable(i - 1) || !usable(i) || !usable(i + 1)) continue;
        if (v(i) > v(i - 1) && v(i) >= v(i + 1) && (!best || v(i) > v(*best))) best = i;
    }
    if (!best) throw NoPeakError();
    const std::size_t i = *best;

    Peak peak;
    // Parabola through the three bracketing samples.
    {
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double curvature = (d12 - d01) / (x2 - x0);
        if (curvature != 0.0) {
            const double xs = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
            peak.theta_star = std::clamp(xs, x0, x2);
            peak.height = y1 + d01 * (peak.theta_star - x1) + curvature * (peak.theta_star - x0) * (peak.theta_star - x1);
        } else {
            peak.theta_star = x1;
            peak.height = y1;
        }
    }

    // Walk down to the adjacent opposite extrema.
    std::size_t left = i, right = i;
    while (left > 0 && usable(left - 1) && v(left - 1) <= v(left)) --left;
    while (right + 1 < x.size() && usable(right + 1) && v(right + 1) <= v(right)) ++right;
    peak.baseline = 0.5 * (y[left] + y[right]);

    const double level = sgn * (peak.baseline + 0.5 * (peak.height - peak.baseline));
    auto crossing = [&](std::size_t from, std::size_t to) {
        // First sample between the peak and an adjacent extremum at or below
        // the half level; linear interpolation between it and its neighbour.
        const int step = to > from ? 1 : -1;
        for (std::size_t j = from; j != to; j += step) {
            const std::size_t nxt = j + step;
            if (v(nxt) <= level) {
                const double t = (v(j) - level) / (v(j) - v(nxt));
                return x[j] + t * (x[nxt] - x[j]);
            }
        }
        return x[to];
    };
    peak.half_width = crossing(i, right) - crossing(i, left);
    return peak;
}

inline Peak find_peak(const DelayProfile& profile, ProfileColumn column, double lo, double hi,
                      std::optional<PeakSense> sense = std::nullopt) {
    std::vector<double> x, y;
    x.reserve(profile.rows.size());
    y.reserve(profile.rows.size());
    for (const auto& row : profile.rows) {
        x.push_back(row.theta);
        y.push_back(column == ProfileColumn::t_delay ? row.t_delay : row.b);
    }
    // Pronounced space-shift peaks point up, time-delay peaks point down.
    const PeakSense s = sense.value_or(column == ProfileColumn::b ? PeakSense::maximum : PeakSense::minimum);
    return find_peak_xy(x, y, lo, hi, s);
}

}  // namespace scatime
