// scatime: scattering time observables from the command line.
//
// Every subcommand writes CSV with '#' header lines (command, parameters,
// units, version) to --out or standard output.
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scatime/scatime.hpp"

using namespace scatime;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    Csv(std::string command_line, std::string units) : command_line_(std::move(command_line)), units_(std::move(units)) {}

    void param(const std::string& name, double v) { params_.push_back(name + "=" + num(v)); }
    void param(const std::string& name, const std::string& v) { params_.push_back(name + "=" + v); }
    void note(const std::string& line) { notes_.push_back(line); }
    void columns(std::vector<std::string> names) { columns_ = std::move(names); }
    void row(const std::vector<double>& values) {
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) line += (i ? "," : "") + num(values[i]);
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::ostringstream os;
        os << "# command: " << command_line_ << '\n';
        os << "# parameters:";
        for (const auto& p : params_) os << ' ' << p;
        os << '\n';
        os << "# units: " << units_ << '\n';
        os << "# version: scatime " << kVersion << '\n';
        for (const auto& n : notes_) os << "# " << n << '\n';
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& r : rows_) os << r << '\n';
        return os.str();
    }

private:
    std::string command_line_;
    std::string units_;
    std::vector<std::string> params_;
    std::vector<std::string> notes_;
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

void emit(const Csv& csv, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << csv.str();
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + out);
    f << csv.str();
    if (!f) throw DomainError("failed writing " + out);
}

void require_positive(const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("--") + name + " must be positive");
}

void require_points(const char* name, int n, int min = 2) {
    if (n < min) throw DomainError(std::string("--") + name + " must be at least " + std::to_string(min));
}

const std::string kUnits3d = UnitSystem{}.describe();

// ---- phase-shifts ----------------------------------------------------------

struct PhaseShiftArgs {
    double kR = 0.0;
    std::optional<int> ellmax;
    std::string out;
};

void run_phase_shifts(const PhaseShiftArgs& a, const std::string& cmd) {
    require_positive("kR", a.kR);
    const HardSphere sphere(1.0);
    const auto kin = Kinematics::from_k(a.kR);
    const int L = a.ellmax.value_or(sphere.suggested_ellmax(kin));
    if (L < 0) throw DomainError("--ellmax must be non-negative");
    const auto table = sphere.table(kin, L);
    Csv csv(cmd, kUnits3d);
    csv.param("kR", a.kR);
    csv.param("ellmax", static_cast<double>(L));
    csv.columns({"ell", "delta_rad", "ddelta_dE"});
    for (int l = 0; l <= L; ++l) csv.row({static_cast<double>(l), table.delta[l], table.ddelta_dE[l]});
    emit(csv, a.out);
}

// ---- delay-scan ------------------------------------------------------------

struct DelayScanArgs {
    double kR = 0.0;
    double theta_min = 0.01;
    double theta_max = std::numbers::pi;
    int points = 2000;
    std::optional<int> ellmax;
    bool peaks = false;
    double peak_max_theta = 0.7;
    std::string out;
};

void run_delay_scan(const DelayScanArgs& a, const std::string& cmd) {
    require_positive("kR", a.kR);
    require_points("points", a.points);
    if (!(a.theta_min > 0.0 && a.theta_min < a.theta_max && a.theta_max <= std::numbers::pi))
        throw DomainError("need 0 < --theta-min < --theta-max <= pi");
    const HardSphere sphere(1.0);
    const auto kin = Kinematics::from_k(a.kR);
    const int L = a.ellmax.value_or(sphere.suggested_ellmax(kin));
    if (L < 0) throw DomainError("--ellmax must be non-negative");
    const auto grid = linspace(a.theta_min, a.theta_max, static_cast<std::size_t>(a.points));
    const auto profile = delay_profile_scan(sphere, kin, grid, L);

    Csv csv(cmd, kUnits3d + "; t_delay_k = k t_delay / (m R), b_over_R = b / R");
    csv.param("kR", a.kR);
    csv.param("theta_min", a.theta_min);
    csv.param("theta_max", a.theta_max);
    csv.param("points", static_cast<double>(a.points));
    csv.param("ellmax", static_cast<double>(L));
    if (a.peaks) {
        for (auto [column, name] : {std::pair{ProfileColumn::b, "b"}, std::pair{ProfileColumn::t_delay, "t_delay"}}) {
            try {
                const auto p = find_peak(profile, column, a.theta_min, a.peak_max_theta);
                csv.note(std::string("peak ") + name + ": theta=" + num(p.theta_star) + " height=" + num(p.height) +
                         " width=" + num(p.half_width) + " baseline=" + num(p.baseline));
            } catch (const NoPeakError&) {
                csv.note(std::string("peak ") + name + ": none");
            }
        }
    }
    csv.columns({"theta_rad", "t_delay_k", "b_over_R", "dsdo_over_R2", "t_class_k", "b_class_over_R"});
    const double k = kin.k();
    for (const auto& r : profile.rows) csv.row({r.theta, k * r.t_delay, r.b, r.dsigma_dOmega, k * r.t_class, r.b_class});
    emit(csv, a.out);
}

// ---- energy-scan -----------------------------------------------------------

struct EnergyScanArgs {
    double theta = 0.0;
    double kR_min = 0.0;
    double kR_max = 0.0;
    int points = 4000;
    bool peak = false;
    std::string out;
};

void run_energy_scan(const EnergyScanArgs& a, const std::string& cmd) {
    if (!(a.theta > 0.0 && a.theta <= std::numbers::pi)) throw DomainError("--theta must lie in (0, pi]");
    require_positive("kR-min", a.kR_min);
    if (!(a.kR_max > a.kR_min)) throw DomainError("need --kR-max > --kR-min");
    require_points("points", a.points);
    const auto grid = linspace(a.kR_min, a.kR_max, static_cast<std::size_t>(a.points));
    const auto rows = energy_profile_scan(HardSphere(1.0), a.theta, grid);

    Csv csv(cmd, kUnits3d);
    csv.param("theta", a.theta);
    csv.param("kR_min", a.kR_min);
    csv.param("kR_max", a.kR_max);
    csv.param("points", static_cast<double>(a.points));
    if (a.peak) {
        std::vector<double> E, t;
        for (const auto& r : rows) {
            E.push_back(r.energy);
            t.push_back(r.t_delay);
        }
        try {
            const auto p = find_peak_xy(E, t, E.front(), E.back(), PeakSense::minimum);
            csv.note("peak t_delay: E=" + num(p.theta_star) + " height=" + num(p.height) + " width=" +
                     num(p.half_width) + " baseline=" + num(p.baseline));
        } catch (const NoPeakError&) {
            csv.note("peak t_delay: none");
        }
    }
    csv.columns({"kR", "E_mR2", "t_delay_mR2", "b_over_R"});
    for (const auto& r : rows) csv.row({r.k, r.energy, r.t_delay, r.b});
    emit(csv, a.out);
}

// ---- oned ------------------------------------------------------------------

struct OnedStepArgs {
    double V0 = 0.0;
    double E = 0.0;
    double D = 0.0;
    double mass = 1.0;
    std::string out;
};

void run_oned_step(const OnedStepArgs& a, const std::string& cmd) {
    require_positive("V0", a.V0);
    require_positive("E", a.E);
    require_positive("mass", a.mass);
    if (!(a.D >= 0.0)) throw DomainError("--D must be non-negative");
    const auto kin = Kinematics::from_energy(a.E, a.mass);
    Csv csv(cmd, "hbar = 1; energies, lengths and times in the units of the inputs");
    csv.param("V0", a.V0);
    csv.param("E", a.E);
    csv.param("D", a.D);
    csv.param("mass", a.mass);
    if (a.E < a.V0) {
        const double t = reflection_delay_semiinfinite_step(a.V0, kin, a.D);
        const double excess = t - 2.0 * a.D / kin.velocity();
        const double q = std::sqrt(2.0 * a.mass * (a.V0 - a.E));
        csv.columns({"E", "t_reflection", "excess_delay", "excess_closed_form", "twice_penetration_depth"});
        csv.row({a.E, t, excess, step_reflection_excess(a.V0, kin), 2.0 / q});
    } else {
        const auto c = transfer_coefficients(StepPotential{a.V0}, kin);
        const double t = transmission_delay(StepPotential{a.V0}, kin);
        csv.columns({"E", "abs_R2", "flux_T", "arg_T", "t_transmission"});
        csv.row({a.E, std::norm(c.R_coef), flux_balance(StepPotential{a.V0}, c, kin) - std::norm(c.R_coef),
                 std::arg(c.T_coef), a.D / kin.velocity() + t});
    }
    emit(csv, a.out);
}

struct OnedBarrierArgs {
    double V0 = 0.0;
    double width = 0.0;
    double E_min = 0.0;
    double E_max = 0.0;
    int points = 400;
    double mass = 1.0;
    std::string out;
};

void run_oned_barrier(const OnedBarrierArgs& a, const std::string& cmd) {
    require_positive("width", a.width);
    require_positive("E-min", a.E_min);
    require_positive("mass", a.mass);
    if (!(a.E_max > a.E_min)) throw DomainError("need --E-max > --E-min");
    require_points("points", a.points);
    const auto pot = barrier(a.V0, a.width);
    Csv csv(cmd, "hbar = 1; barrier on [0, width]; energies, lengths and times in the units of the inputs");
    csv.param("V0", a.V0);
    csv.param("width", a.width);
    csv.param("E_min", a.E_min);
    csv.param("E_max", a.E_max);
    csv.param("points", static_cast<double>(a.points));
    csv.param("mass", a.mass);
    csv.columns({"E", "abs_T2", "abs_R2", "arg_T", "t_transmission_delay"});
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (double E : linspace(a.E_min, a.E_max, static_cast<std::size_t>(a.points))) {
        const auto kin = Kinematics::from_energy(E, a.mass);
        double t2 = nan, r2 = nan, arg = nan, delay = nan;
        try {
            const auto c = transfer_coefficients(pot, kin);
            t2 = std::norm(c.T_coef);
            r2 = std::norm(c.R_coef);
            arg = std::arg(c.T_coef);
            delay = transmission_delay(pot, kin);
        } catch (const CoefficientNodeError&) {
        }
        csv.row({E, t2, r2, arg, delay});
    }
    emit(csv, a.out);
}

// ---- arrival ---------------------------------------------------------------

struct ArrivalArgs {
    double E0 = 0.0;
    double sigmaE = 0.0;
    double D = 0.0;
    double mass = 1.0;
    std::optional<double> t_min;
    std::optional<double> t_max;
    int t_points = 2000;
    int e_points = kDefaultPacketPoints;
    std::string out;
};

void run_arrival(const ArrivalArgs& a, const std::string& cmd) {
    require_positive("E0", a.E0);
    require_positive("sigmaE", a.sigmaE);
    require_positive("mass", a.mass);
    require_points("t-points", a.t_points);
    require_points("e-points", a.e_points, 3);
    const double k0 = k_from_energy(a.E0, a.mass);
    const double flight = a.mass * a.D / k0;
    // Intrinsic width 1/(2 sigma_E) plus velocity dispersion over the flight.
    const double spread = 1.0 / (2.0 * a.sigmaE) + std::abs(flight) * a.sigmaE / (2.0 * a.E0);
    const double t_lo = a.t_min.value_or(flight - 12.0 * spread);
    const double t_hi = a.t_max.value_or(flight + 12.0 * spread);
    if (!(t_hi > t_lo)) throw DomainError("need --t-max > --t-min");
    const auto packet = gaussian_packet(a.E0, a.sigmaE, a.e_points).with_detector_distance(a.D, a.mass);
    const auto times = linspace(t_lo, t_hi, static_cast<std::size_t>(a.t_points));
    const auto dist = kijowski_density(packet, times);

    Csv csv(cmd, "hbar = 1; energies, lengths and times in the units of the inputs");
    csv.param("E0", a.E0);
    csv.param("sigmaE", a.sigmaE);
    csv.param("D", a.D);
    csv.param("mass", a.mass);
    csv.param("t_min", t_lo);
    csv.param("t_max", t_hi);
    csv.param("t_points", static_cast<double>(a.t_points));
    csv.param("e_points", static_cast<double>(a.e_points));
    csv.note("mean=" + num(dist.mean) + " variance=" + num(dist.variance) + " captured=" + num(dist.captured) +
             " free_flight=" + num(flight));
    if (dist.incomplete_coverage) {
        csv.note("warning: time grid captures less than 99.9% of the probability");
        std::cerr << "scatime: warning: time grid captures only " << num(dist.captured) << " of the probability\n";
    }
    csv.columns({"t", "density"});
    for (std::size_t i = 0; i < times.size(); ++i) csv.row({times[i], dist.density[i]});
    emit(csv, a.out);
}

// ---- wkb -------------------------------------------------------------------

struct WkbArgs {
    double kR = 0.0;
    double theta = 0.0;
    std::string potential = "hard-sphere";
    double V0 = 0.0;
    double width = 1.0;
    std::string out;
};

void run_wkb(const WkbArgs& a, const std::string& cmd) {
    require_positive("kR", a.kR);
    if (!(a.theta > 0.0 && a.theta <= std::numbers::pi)) throw DomainError("--theta must lie in (0, pi]");
    const bool hard = a.potential == "hard-sphere";
    if (!hard) require_positive("width", a.width);
    const auto pot = hard ? hard_sphere_potential(1.0) : gaussian_potential(a.V0, a.width);
    const auto kin = Kinematics::from_k(a.kR);

    Csv csv(cmd, kUnits3d);
    csv.param("kR", a.kR);
    csv.param("theta", a.theta);
    csv.param("potential", a.potential);
    if (!hard) {
        csv.param("V0", a.V0);
        csv.param("width", a.width);
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double t_exact = nan, b_exact = nan, t_class = nan, b_class = nan;
    if (hard) {
        const HardSphere sphere(1.0);
        const int L = sphere.suggested_ellmax(kin);
        try {
            t_exact = angular_time_delay(sphere, kin, a.theta, L);
            b_exact = space_shift(sphere, kin, a.theta, L);
        } catch (const AmplitudeNodeError&) {
        }
        t_class = classical_delay(1.0, kin, a.theta);
        b_class = classical_space_shift(1.0, a.theta);
    }
    const auto branches = classical_branches(pot, kin, a.theta);
    if (branches.empty()) throw MultiBranchError("no classical branch at this angle", {});
    if (branches.size() > 1) csv.note("warning: several classical branches; interference not modelled");
    csv.columns({"J_star", "Theta", "delta_wkb", "t_semiclassical", "b_semiclassical", "t_exact", "b_exact",
                 "t_classical", "b_classical"});
    for (const auto& br : branches) {
        const double delta = wkb_delta_at(pot, kin, br.J);
        const double t = 2.0 * detail::wkb_integrals(pot, kin, br.J).ddelta_dE;
        csv.row({br.J, br.Theta, delta, t, br.sign * br.J / kin.k(), t_exact, b_exact, t_class, b_class});
    }
    emit(csv, a.out);
}

std::string join_args(int argc, char** argv) {
    std::string s = "scatime";
    for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering time observables: angular time delay, space shift, 1D delays, arrival times, WKB"};
    app.set_version_flag("--version", std::string("scatime ") + kVersion);
    app.require_subcommand(1);
    const std::string cmd = join_args(argc, argv);

    PhaseShiftArgs ps;
    auto* c_ps = app.add_subcommand("phase-shifts", "Hard-sphere phase shifts and their energy derivatives");
    c_ps->add_option("--kR", ps.kR, "k times sphere radius")->required();
    c_ps->add_option("--ellmax", ps.ellmax, "highest partial wave (default: suggested cutoff)");
    c_ps->add_option("--out", ps.out, "output path (default: standard output)");

    DelayScanArgs ds;
    auto* c_ds = app.add_subcommand("delay-scan", "Time delay, space shift and cross section versus angle");
    c_ds->add_option("--kR", ds.kR, "k times sphere radius")->required();
    c_ds->add_option("--theta-min", ds.theta_min, "smallest angle [rad]")->capture_default_str();
    c_ds->add_option("--theta-max", ds.theta_max, "largest angle [rad]")->capture_default_str();
    c_ds->add_option("--points", ds.points, "number of angles")->capture_default_str();
    c_ds->add_option("--ellmax", ds.ellmax, "highest partial wave (default: suggested cutoff)");
    c_ds->add_flag("--peaks", ds.peaks, "report the forward b and t_delay peaks in the header");
    c_ds->add_option("--peak-max-theta", ds.peak_max_theta, "upper end of the peak window [rad]")->capture_default_str();
    c_ds->add_option("--out", ds.out, "output path (default: standard output)");

    EnergyScanArgs es;
    auto* c_es = app.add_subcommand("energy-scan", "Time delay and space shift versus kR at fixed angle");
    c_es->add_option("--theta", es.theta, "scattering angle [rad]")->required();
    c_es->add_option("--kR-min", es.kR_min, "smallest kR")->required();
    c_es->add_option("--kR-max", es.kR_max, "largest kR")->required();
    c_es->add_option("--points", es.points, "number of kR values")->capture_default_str();
    c_es->add_flag("--peak", es.peak, "report the most pronounced time-delay minimum in the header");
    c_es->add_option("--out", es.out, "output path (default: standard output)");

    auto* c_1d = app.add_subcommand("oned", "One-dimensional step and barrier delays");
    c_1d->require_subcommand(1);
    OnedStepArgs st;
    auto* c_st = c_1d->add_subcommand("step", "Potential step at x = 0");
    c_st->add_option("--V0", st.V0, "step height")->required();
    c_st->add_option("--E", st.E, "energy")->required();
    c_st->add_option("--D", st.D, "detector distance from the step")->capture_default_str();
    c_st->add_option("--mass", st.mass, "particle mass")->capture_default_str();
    c_st->add_option("--out", st.out, "output path (default: standard output)");
    OnedBarrierArgs ba;
    auto* c_ba = c_1d->add_subcommand("barrier", "Rectangular barrier on [0, width], scanned in energy");
    c_ba->add_option("--V0", ba.V0, "barrier height")->required();
    c_ba->add_option("--width", ba.width, "barrier width")->required();
    c_ba->add_option("--E-min", ba.E_min, "smallest energy")->required();
    c_ba->add_option("--E-max", ba.E_max, "largest energy")->required();
    c_ba->add_option("--points", ba.points, "number of energies")->capture_default_str();
    c_ba->add_option("--mass", ba.mass, "particle mass")->capture_default_str();
    c_ba->add_option("--out", ba.out, "output path (default: standard output)");

    ArrivalArgs ar;
    auto* c_ar = app.add_subcommand("arrival", "Kijowski arrival-time density of a Gaussian packet");
    c_ar->add_option("--E0", ar.E0, "mean energy")->required();
    c_ar->add_option("--sigmaE", ar.sigmaE, "energy spread (std of |psi|^2)")->required();
    c_ar->add_option("--D", ar.D, "source distance upstream of the detector")->capture_default_str();
    c_ar->add_option("--mass", ar.mass, "particle mass")->capture_default_str();
    c_ar->add_option("--t-min", ar.t_min, "first time (default: automatic)");
    c_ar->add_option("--t-max", ar.t_max, "last time (default: automatic)");
    c_ar->add_option("--t-points", ar.t_points, "number of times")->capture_default_str();
    c_ar->add_option("--e-points", ar.e_points, "energy quadrature points")->capture_default_str();
    c_ar->add_option("--out", ar.out, "output path (default: standard output)");

    WkbArgs wk;
    auto* c_wk = app.add_subcommand("wkb", "Semiclassical delay and space shift against exact values");
    c_wk->add_option("--kR", wk.kR, "k times length scale")->required();
    c_wk->add_option("--theta", wk.theta, "scattering angle [rad]")->required();
    c_wk->add_option("--potential", wk.potential, "hard-sphere or gaussian")
        ->check(CLI::IsMember({"hard-sphere", "gaussian"}))
        ->capture_default_str();
    c_wk->add_option("--V0", wk.V0, "Gaussian strength");
    c_wk->add_option("--width", wk.width, "Gaussian width")->capture_default_str();
    c_wk->add_option("--out", wk.out, "output path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_ps->parsed()) run_phase_shifts(ps, cmd);
        else if (c_ds->parsed()) run_delay_scan(ds, cmd);
        else if (c_es->parsed()) run_energy_scan(es, cmd);
        else if (c_st->parsed()) run_oned_step(st, cmd);
        else if (c_ba->parsed()) run_oned_barrier(ba, cmd);
        else if (c_ar->parsed()) run_arrival(ar, cmd);
        else if (c_wk->parsed()) run_wkb(wk, cmd);
    } catch (const DomainError& e) {
        std::cerr << "scatime: error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "scatime: numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
