#pragma once

// Occurrence-time statistics for energy wave packets: the Kijowski density of a
// thin detector, expectation values with a diagonal kernel t^P(E), and delays
// between two dynamics fed the same incoming packet.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "scatime/kinematics.hpp"

namespace scatime {

namespace detail {

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

inline std::vector<double> trapezoid_weights(std::span<const double> x) {
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double h = 0.5 * (x[i] - x[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    return w;
}

}  // namespace detail

/// psi(E) sampled on a strictly increasing positive energy grid, unit norm.
class SpectralPacket {
public:
    SpectralPacket(std::vector<double> energy_grid, std::vector<std::complex<double>> psi)
        : energy_(std::move(energy_grid)), psi_(std::move(psi)) {
        if (energy_.size() < 3 || energy_.size() != psi_.size())
            throw DomainError("SpectralPacket: need at least 3 samples and one amplitude per energy");
        if (!(energy_.front() > 0.0)) throw DomainError("SpectralPacket: energies must be positive");
        for (std::size_t i = 1; i < energy_.size(); ++i)
            if (!(energy_[i] > energy_[i - 1])) throw DomainError("SpectralPacket: energy grid must increase");
        double peak = 0.0;
        for (const auto& p : psi_) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw DomainError("SpectralPacket: non-finite amplitude");
            peak = std::max(peak, std::abs(p));
        }
        if (std::abs(psi_.front()) > 1e-12 * peak || std::abs(psi_.back()) > 1e-12 * peak)
            throw DomainError("SpectralPacket: psi must vanish at both ends of the grid");
        if (std::abs(norm() - 1.0) > 1e-6) throw DomainError("SpectralPacket: psi is not normalized");
    }

    /// Scales psi to unit norm before validating.
    static SpectralPacket normalized(std::vector<double> energy_grid, std::vector<std::complex<double>> psi) {
        std::vector<double> density(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) density[i] = std::norm(psi[i]);
        if (energy_grid.size() != psi.size()) throw DomainError("SpectralPacket: size mismatch");
        const double n = detail::trapezoid(energy_grid, density);
        if (!(n > 0.0)) throw DomainError("SpectralPacket: zero wave function");
        for (auto& p : psi) p /= std::sqrt(n);
        return SpectralPacket(std::move(energy_grid), std::move(psi));
    }

    const std::vector<double>& energy_grid() const noexcept { return energy_; }
    const std::vector<std::complex<double>>& psi() const noexcept { return psi_; }

    std::vector<double> density() const {
        std::vector<double> d(psi_.size());
        for (std::size_t i = 0; i < psi_.size(); ++i) d[i] = std::norm(psi_[i]);
        return d;
    }
    double norm() const { return detail::trapezoid(energy_, density()); }

    /// Multiply psi by exp(i phase(E)).
    template <class F>
    SpectralPacket with_phase(F&& phase) const {
        auto out = psi_;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, phase(energy_[i]));
        return SpectralPacket(energy_, std::move(out));
    }

    /// Source a distance D upstream of the detector: factor exp(+ikD).
    SpectralPacket with_detector_distance(double D, double mass = 1.0) const {
        return with_phase([=](double e) { return k_from_energy(e, mass) * D; });
    }

    /// Factor exp(i E tau); moves the occurrence time by +tau.
    SpectralPacket time_shifted(double tau) const {
        return with_phase([=](double e) { return e * tau; });
    }

private:
    std::vector<double> energy_;
    std::vector<std::complex<double>> psi_;
};

inline constexpr int kDefaultPacketPoints = 4096;
inline constexpr double kGaussianCutoff = 12.0;

/// Real Gaussian with |psi|^2 of standard deviation sigma_E, sampled on E0 +- 12 sigma_E.
inline SpectralPacket gaussian_packet(double E0, double sigma_E, int points = kDefaultPacketPoints) {
    if (!(sigma_E > 0.0) || !(E0 > 0.0)) throw DomainError("gaussian_packet: E0 and sigma_E must be positive");
    if (points < 3) throw DomainError("gaussian_packet: need at least 3 points");
    const double lo = E0 - kGaussianCutoff * sigma_E;
    if (!(lo > 0.0)) throw DomainError("gaussian_packet: packet reaches E <= 0; reduce sigma_E");
    auto grid = linspace(lo, E0 + kGaussianCutoff * sigma_E, static_cast<std::size_t>(points));
    std::vector<std::complex<double>> psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = (grid[i] - E0) / sigma_E;
        psi[i] = std::exp(-0.25 * u * u);
    }
    return SpectralPacket::normalized(std::move(grid), std::move(psi));
}

/// Sample an arbitrary shape f(E) on [lo, hi] and normalize.
template <class F>
SpectralPacket packet_from_function(double lo, double hi, F&& f, int points = kDefaultPacketPoints) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("packet_from_function: need 0 < lo < hi");
    auto grid = linspace(lo, hi, static_cast<std::size_t>(points));
    std::vector<std::complex<double>> psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = f(grid[i]);
    return SpectralPacket::normalized(std::move(grid), std::move(psi));
}

struct ArrivalDistribution {
    std::vector<double> t_grid;
    std::vector<double> density;
    double mean = 0.0;
    double variance = 0.0;
    double captured = 0.0;         ///< integral of the density over t_grid
    bool incomplete_coverage = false;  ///< captured < 0.999
};

/// Pi(t) = |int psi(E) exp(-iEt) dE|^2 / 2 pi on the given times.
inline ArrivalDistribution kijowski_density(const SpectralPacket& packet, std::span<const double> t_grid) {
    if (t_grid.size() < 2) throw DomainError("kijowski_density: need at least 2 times");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("kijowski_density: time grid must increase");
    const auto& E = packet.energy_grid();
    const auto& psi = packet.psi();
    const auto w = detail::trapezoid_weights(E);
    ArrivalDistribution out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.density.resize(t_grid.size());
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        std::complex<double> amp = 0.0;
        for (std::size_t i = 0; i < E.size(); ++i) amp += w[i] * psi[i] * std::polar(1.0, -E[i] * t_grid[j]);
        out.density[j] = std::max(0.0, std::norm(amp) / (2.0 * std::numbers::pi));
    }
    out.captured = detail::trapezoid(t_grid, out.density);
    out.incomplete_coverage = out.captured < 0.999;
    std::vector<double> moment(t_grid.size());
    for (std::size_t j = 0; j < t_grid.size(); ++j) moment[j] = t_grid[j] * out.density[j];
    out.mean = detail::trapezoid(t_grid, moment) / out.captured;
    for (std::size_t j = 0; j < t_grid.size(); ++j) moment[j] = std::pow(t_grid[j] - out.mean, 2) * out.density[j];
    out.variance = std::max(0.0, detail::trapezoid(t_grid, moment) / out.captured);
    return out;
}

/// <Psi| T^P |Psi> = int conj(psi) (-i d/dE) psi dE + int |psi|^2 tP(E) dE.
template <class F>
double occurrence_mean_with_kernel(const SpectralPacket& packet, F&& tP) {
    const auto& E = packet.energy_grid();
    const auto& psi = packet.psi();
    const std::size_t n = E.size();
    const std::complex<double> minus_i(0.0, -1.0);
    std::vector<double> re(n), im(n), kern(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = (i == 0) ? 0 : i - 1, b = (i + 1 == n) ? n - 1 : i + 1;
        const std::complex<double> dpsi = (psi[b] - psi[a]) / (E[b] - E[a]);
        const std::complex<double> v = std::conj(psi[i]) * minus_i * dpsi;
        re[i] = v.real();
        im[i] = v.imag();
        kern[i] = std::norm(psi[i]) * tP(E[i]);
    }
    const double imag = detail::trapezoid(E, im);
    if (std::abs(imag) > 1e-6) throw HermiticityError("occurrence_mean_with_kernel: non-negligible imaginary part");
    return detail::trapezoid(E, re) + detail::trapezoid(E, kern);
}

/// int |psi|^2 (tP_with - tP_free) dE; the derivative terms cancel identically.
template <class F, class G>
double delay_between_dynamics(const SpectralPacket& packet, F&& tP_with, G&& tP_free) {
    const auto& E = packet.energy_grid();
    std::vector<double> y(E.size());
    for (std::size_t i = 0; i < E.size(); ++i) y[i] = std::norm(packet.psi()[i]) * (tP_with(E[i]) - tP_free(E[i]));
    return detail::trapezoid(E, y);
}

}  // namespace scatime
