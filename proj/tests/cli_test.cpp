#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(SCATIME_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("no column " + name);
    }
    std::string comment_with(const std::string& prefix) const {
        for (const auto& c : comments)
            if (c.rfind(prefix, 0) == 0) return c;
        return {};
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

Table parse(const std::string& text) {
    Table t;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.substr(2));
        } else if (t.columns.empty()) {
            t.columns = split(line);
        } else {
            std::vector<double> row;
            for (const auto& f : split(line)) row.push_back(std::stod(f));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

// Value of key=value inside a header comment.
double field(const std::string& comment, const std::string& key) {
    const auto pos = comment.find(key + "=");
    if (pos == std::string::npos) return std::nan("");
    return std::stod(comment.substr(pos + key.size() + 1));
}

}  // namespace

TEST(Cli, PhaseShiftsSWave) {
    const auto r = run("phase-shifts --kR 2");
    ASSERT_EQ(r.status, 0);
    const auto t = parse(r.out);
    ASSERT_EQ(t.columns, (std::vector<std::string>{"ell", "delta_rad", "ddelta_dE"}));
    EXPECT_EQ(t.rows[0][0], 0.0);
    EXPECT_NEAR(t.rows[0][1], -2.0, 1e-12);
    EXPECT_FALSE(t.comment_with("units:").empty());
    EXPECT_FALSE(t.comment_with("version:").empty());
    EXPECT_FALSE(t.comment_with("command:").empty());
    EXPECT_FALSE(std::isnan(field(t.comment_with("parameters:"), "ellmax")));
}

TEST(Cli, PhaseShiftsSmallArgumentLaw) {
    const auto t = parse(run("phase-shifts --kR 0.01 --ellmax 3").out);
    ASSERT_EQ(t.rows.size(), 4u);
    // -((l+1)! l! / ((2l+2)! (2l)!)) (2kR)^(2l+1)
    const std::array<double, 3> coeff = {1.0 / 2.0, 2.0 / (24.0 * 2.0), 12.0 / (720.0 * 24.0)};
    for (int l = 0; l < 3; ++l) {
        const double law = -coeff[l] * std::pow(0.02, 2 * l + 1);
        EXPECT_NEAR(t.rows[l][1] / law, 1.0, 0.01) << l;
    }
}

TEST(Cli, FloatsCarrySeventeenDigits) {
    const auto r = run("phase-shifts --kR 2 --ellmax 1");
    EXPECT_NE(r.out.find("-0.89285128220590948"), std::string::npos);
}

TEST(Cli, InvalidArgumentsExitTwo) {
    const auto r = run("phase-shifts --kR -1", true);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("kR"), std::string::npos);
    EXPECT_EQ(run("phase-shifts").status, 2);
    EXPECT_EQ(run("phase-shifts --kR 2 --bogus 1").status, 2);
    EXPECT_EQ(run("no-such-command").status, 2);
    EXPECT_EQ(run("delay-scan --kR 2 --theta-min 1 --theta-max 0.5").status, 2);
    EXPECT_EQ(run("delay-scan --kR 2 --theta-max 4").status, 2);
    EXPECT_EQ(run("energy-scan --theta 0.2 --kR-min 3 --kR-max 3").status, 2);
    EXPECT_EQ(run("arrival --E0 0.5 --sigmaE 0").status, 2);
}

TEST(Cli, HelpExitsZero) {
    const auto r = run("--help");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("delay-scan"), std::string::npos);
}

TEST(Cli, DelayScanColumnsAndForwardPeak) {
    const auto r = run("delay-scan --kR 20 --peaks");
    ASSERT_EQ(r.status, 0);
    const auto t = parse(r.out);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"theta_rad", "t_delay_k", "b_over_R", "dsdo_over_R2", "t_class_k",
                                                   "b_class_over_R"}));
    ASSERT_EQ(t.rows.size(), 2000u);
    EXPECT_NEAR(t.rows.front()[0], 0.01, 1e-15);
    EXPECT_NEAR(t.rows.back()[0], M_PI, 1e-15);
    double bmax = 0.0;
    for (const auto& row : t.rows)
        if (row[0] < 0.7) bmax = std::max(bmax, row[t.col("b_over_R")]);
    EXPECT_NEAR(bmax / 2.7, 1.0, 0.10);
    EXPECT_NEAR(field(t.comment_with("peak b:"), "height") / 2.7, 1.0, 0.10);
    // Backscattering: k t -> -2 R (m = R = 1).
    EXPECT_NEAR(t.rows.back()[t.col("t_delay_k")] / -2.0, 1.0, 0.15);
    EXPECT_NEAR(t.rows.back()[t.col("t_class_k")], -2.0, 1e-12);
}

TEST(Cli, EnergyScanPeak) {
    const auto r = run("energy-scan --theta 0.1792 --kR-min 12 --kR-max 28 --peak");
    ASSERT_EQ(r.status, 0);
    const auto t = parse(r.out);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"kR", "E_mR2", "t_delay_mR2", "b_over_R"}));
    ASSERT_EQ(t.rows.size(), 4000u);
    EXPECT_NEAR(t.rows[0][1], 72.0, 1e-12);
    const auto peak = t.comment_with("peak t_delay:");
    EXPECT_NEAR(std::abs(field(peak, "height")) / 0.02, 1.0, 0.25);
    EXPECT_NEAR(field(peak, "width") / 80.0, 1.0, 0.30);
}

TEST(Cli, OnedStepExample) {
    const auto r = run("oned step --V0 2 --E 1 --D 10");
    ASSERT_EQ(r.status, 0);
    const auto t = parse(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_NEAR(t.rows[0][t.col("excess_delay")], 1.0, 1e-8);
    EXPECT_NEAR(t.rows[0][t.col("twice_penetration_depth")], std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(t.rows[0][t.col("t_reflection")], 20.0 / std::sqrt(2.0) + 1.0, 1e-8);
}

TEST(Cli, OnedBarrierWritesNanWhenOpaque) {
    const auto r = run("oned barrier --V0 400 --width 8 --E-min 0.1 --E-max 0.2 --points 3");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find(",nan"), std::string::npos);
    EXPECT_EQ(r.out.find("-nan"), std::string::npos);
}

TEST(Cli, ArrivalFreeFlight) {
    const auto r = run("arrival --E0 0.5 --sigmaE 0.02 --D 50");
    ASSERT_EQ(r.status, 0);
    const auto t = parse(r.out);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "density"}));
    const auto stats = t.comment_with("mean=");
    EXPECT_NEAR(field(stats, "mean") / 50.0, 1.0, 0.01);
    EXPECT_GT(field(stats, "variance"), 0.0);
    EXPECT_NEAR(field(stats, "captured"), 1.0, 1e-6);
}

TEST(Cli, WkbAgainstExact) {
    const auto r = run("wkb --kR 50 --theta 2.0");
    ASSERT_EQ(r.status, 0);
    const auto t = parse(r.out);
    ASSERT_EQ(t.rows.size(), 1u);
    const auto& row = t.rows[0];
    EXPECT_NEAR(row[t.col("t_semiclassical")] / row[t.col("t_exact")], 1.0, 0.05);
    EXPECT_NEAR(row[t.col("b_semiclassical")] / row[t.col("b_exact")], 1.0, 0.05);
}

TEST(Cli, NumericalFailureExitsThree) {
    // Forward diffraction: no classical orbit reaches this angle.
    const auto r = run("wkb --kR 50 --theta 0.001", true);
    EXPECT_EQ(r.status, 3);
    EXPECT_FALSE(r.out.empty());
}

TEST(Cli, IdenticalInvocationsAreIdentical) {
    EXPECT_EQ(run("delay-scan --kR 2 --points 300").out, run("delay-scan --kR 2 --points 300").out);
}

TEST(Cli, OutWritesFile) {
    const auto path = std::filesystem::temp_directory_path() / "scatime_cli_test.csv";
    std::filesystem::remove(path);
    const auto r = run("phase-shifts --kR 2 --out " + path.string());
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto from_file = parse(ss.str());
    const auto from_stdout = parse(run("phase-shifts --kR 2").out);
    EXPECT_EQ(from_file.rows, from_stdout.rows);
    EXPECT_EQ(from_file.comment_with("parameters:"), from_stdout.comment_with("parameters:"));
    std::filesystem::remove(path);
}
