#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cpshift/cli.hpp"

using namespace cpshift;
using namespace cpshift::cli;

namespace {

RunConfig small_config()
{
    RunConfig c;
    apply_text(c, "a_tilde = 0.05\nhalf_extent = 40\nz_min = 0.1\nz_max = 1\npoints_per_decade = 8\n");
    return c;
}

std::size_t column(const SweepTable& t, const std::string& name)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == name) return i;
    throw std::runtime_error("no column " + name);
}

std::string sweep_csv(const RunConfig& c)
{
    std::ostringstream out, notes;
    cmd_sweep(c, out, notes);
    return out.str();
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / ("cpshift_test_" + name); }

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(CPSHIFT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class EnvGuard {
public:
    EnvGuard() { unsetenv(threads_env); }
    ~EnvGuard() { unsetenv(threads_env); }
};

}

TEST(Config, ParsesKeyValueText)
{
    RunConfig c;
    apply_text(c, "# comment\nmu = 0.3\n rho=2e-6  # trailing\n\norientation = zx\nhalf_extent = 12\nthreads = 3\n");
    EXPECT_EQ(c.params.mu, 0.3);
    EXPECT_EQ(c.params.rho, 2e-6);
    EXPECT_EQ(c.orientation, "zx");
    EXPECT_EQ(c.lattice.half_extent, 12);
    EXPECT_EQ(c.threads, 3u);
}

TEST(Config, Errors)
{
    RunConfig c;
    EXPECT_THROW(apply_text(c, "colour = blue\n"), ConfigError);
    EXPECT_THROW(apply_text(c, "mu 0.3\n"), ConfigError);
    EXPECT_THROW(apply_text(c, "mu = abc\n"), ConfigError);
    EXPECT_THROW(apply_text(c, "half_extent = 2.5\n"), ConfigError);
    EXPECT_THROW(apply_text(c, "orientation = yy\n"), ConfigError);
    EXPECT_THROW(apply_file(c, "/nonexistent/cpshift.cfg"), ConfigError);
}

TEST(Config, OrientationResolution)
{
    EnvGuard env;
    RunConfig c;
    EXPECT_EQ(finalize(c).params.array_dipole.z, 1.0);
    apply_setting(c, "orientation", "zx");
    EXPECT_EQ(finalize(c).params.array_dipole.x, 1.0);
    apply_setting(c, "orientation", "custom");
    EXPECT_THROW(finalize(c), ConfigError);
    apply_setting(c, "test_dipole", "0,0,1");
    apply_setting(c, "array_dipole", "0.6, 0.8, 0");
    const auto f = finalize(c);
    EXPECT_EQ(f.params.array_dipole.y, 0.8);
    apply_setting(c, "array_dipole", "1,1,0");
    EXPECT_THROW(finalize(c), NonUnitDipole);
    RunConfig d;
    apply_setting(d, "test_dipole", "0,0,1");
    EXPECT_THROW(finalize(d), ConfigError);
}

TEST(Config, AtomsKey)
{
    RunConfig c;
    apply_setting(c, "atoms", "1e6");
    EXPECT_EQ(c.lattice.half_extent, 499);
}

TEST(Config, ThreadsFromEnvironment)
{
    EnvGuard env;
    RunConfig c;
    c.threads = 2;
    setenv(threads_env, "7", 1);
    EXPECT_EQ(finalize(c).threads, 7u);
    setenv(threads_env, "x", 1);
    EXPECT_THROW(finalize(c), ConfigError);
}

TEST(Sweep, RowsIncreaseAndColumnsMatchOrientation)
{
    EnvGuard env;
    const auto t = build_sweep(small_config());
    ASSERT_EQ(t.rows.size(), 9u);
    for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_GT(t.rows[i][0], t.rows[i - 1][0]);
    for (const auto& r : regimes_for(Orientation::zz)) EXPECT_NO_THROW(column(t, "asym_" + to_string(r)));
    for (const auto& name : t.columns) EXPECT_EQ(name.find("_zx_"), std::string::npos);
    EXPECT_EQ(t.rows.front()[0], 0.1);
}

TEST(Sweep, SingleAtomDirectEqualsVertex)
{
    EnvGuard env;
    auto c = small_config();
    apply_setting(c, "half_extent", "0");
    const auto t = build_sweep(c);
    const auto direct = column(t, "resonant_direct"), vertex = column(t, "resonant_vertex");
    const auto odirect = column(t, "offresonant_direct"), overtex = column(t, "offresonant_vertex");
    for (const auto& row : t.rows) {
        EXPECT_EQ(row[direct], row[vertex]);
        EXPECT_EQ(row[odirect], row[overtex]);
    }
}

TEST(Sweep, OrthogonalSingleAtomIsZero)
{
    EnvGuard env;
    auto c = small_config();
    apply_text(c, "half_extent = 0\norientation = zx\n");
    const auto t = build_sweep(c);
    for (const auto& row : t.rows) {
        EXPECT_EQ(row[column(t, "resonant_direct")], 0.0);
        EXPECT_EQ(row[column(t, "offresonant_direct")], 0.0);
    }
    for (const auto& r : regimes_for(Orientation::zx)) EXPECT_NO_THROW(column(t, "asym_" + to_string(r)));
}

TEST(Sweep, CustomOrientationHasNoAsymptotes)
{
    EnvGuard env;
    auto c = small_config();
    apply_text(c, "orientation = custom\ntest_dipole = 0.6,0,0.8\narray_dipole = 0,0,1\nhalf_extent = 5\n");
    std::ostringstream notes;
    const auto t = build_sweep(c, &notes);
    EXPECT_EQ(t.columns.size(), 11u);
    EXPECT_TRUE(std::isnan(t.rows[0][column(t, "resonant_bulk")]));
    EXPECT_TRUE(std::isfinite(t.rows[0][column(t, "resonant_direct")]));
    EXPECT_NE(notes.str().find("not reflection-even"), std::string::npos);
}

TEST(Sweep, SiteBudget)
{
    EnvGuard env;
    auto c = small_config();
    apply_text(c, "half_extent = 100000\nsite_budget = 1e9\n");
    EXPECT_THROW(build_sweep(c), SiteBudgetExceeded);
    apply_text(c, "half_extent = 300\nsite_budget = 1e10\n");
    std::ostringstream notes;
    const auto t = build_sweep(c, &notes);
    EXPECT_TRUE(std::isnan(t.rows[0][column(t, "offresonant_direct")]));
    EXPECT_NE(notes.str().find("offres_site_budget"), std::string::npos);
}

TEST(Sweep, IdenticalBytesAcrossThreadCounts)
{
    EnvGuard env;
    auto c = small_config();
    apply_text(c, "half_extent = 400\noffres_site_budget = 1e5\n");
    const std::string ref = sweep_csv(c);
    for (const char* t : {"4", "16"}) {
        apply_setting(c, "threads", t);
        EXPECT_EQ(sweep_csv(c), ref) << t;
    }
}

TEST(Sweep, FitRoundTripIsBitExact)
{
    EnvGuard env;
    auto c = small_config();
    apply_text(c, "a_tilde = 0.01\nhalf_extent = 2000\nz_min = 0.1\nz_max = 0.5\npoints_per_decade = 16\n");
    const auto t = build_sweep(c);
    std::vector<SamplePoint> pts;
    const auto col = column(t, "resonant_direct");
    for (const auto& row : t.rows) pts.push_back({row[0], row[col]});
    const auto in_process = fit_power_law(pts, {0.1, 0.5});
    const auto path = temp_file("roundtrip.csv");
    {
        std::ofstream out(path);
        write_csv(t, out);
    }
    std::ostringstream report;
    const auto from_file = cmd_fit(path.string(), "resonant_direct", {0.1, 0.5}, FitMode::direct, report);
    EXPECT_EQ(from_file.slope, in_process.slope);
    EXPECT_EQ(from_file.intercept, in_process.intercept);
    EXPECT_EQ(from_file.r_squared, in_process.r_squared);
    EXPECT_NE(report.str().find("slope=" + fmt17(in_process.slope)), std::string::npos);
    EXPECT_THROW(cmd_fit(path.string(), "no_such_column", {0.1, 0.5}, FitMode::direct, report), ConfigError);
    std::filesystem::remove(path);
}

TEST(Decompose, Reports)
{
    EnvGuard env;
    auto dense = small_config();
    apply_text(dense, "a_tilde = 0.01\nhalf_extent = 100\n");
    std::ostringstream out;
    cmd_decompose(dense, 0.3, out);
    EXPECT_NE(out.str().find("resonant: bulk="), std::string::npos);
    EXPECT_NE(out.str().find("(bulk-dominated"), std::string::npos);
    EXPECT_NE(out.str().find("M=100 atoms=40401"), std::string::npos);

    auto sparse = small_config();
    apply_text(sparse, "a_tilde = 100\nhalf_extent = 3\n");
    std::ostringstream sp;
    cmd_decompose(sparse, 0.01, sp);
    EXPECT_NE(sp.str().find("(vertex-dominated"), std::string::npos);

    // CSV block: total is the bit-exact sum of the printed parts
    std::istringstream lines(sp.str());
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("resonant,", 0) != 0 && line.rfind("off_resonant,", 0) != 0) continue;
        const auto f = split_csv_line(line);
        const double bulk = std::strtod(f[4].c_str(), nullptr), edge = std::strtod(f[5].c_str(), nullptr);
        const double vertex = std::strtod(f[6].c_str(), nullptr), total = std::strtod(f[7].c_str(), nullptr);
        EXPECT_EQ(total, bulk + edge + vertex);
        ++rows;
    }
    EXPECT_EQ(rows, 2);
}

TEST(Asymptotic, Table)
{
    EnvGuard env;
    std::ostringstream out;
    cmd_asymptotic(small_config(), 0.2, out);
    EXPECT_NE(out.str().find("res_zz_nonret_dense,"), std::string::npos);
    auto custom = small_config();
    apply_text(custom, "orientation = custom\ntest_dipole = 0,0,1\narray_dipole = 0,1,0\n");
    EXPECT_THROW(cmd_asymptotic(custom, 0.2, out), ConfigError);
}

TEST(VerifyDiagrams, ExitCodes)
{
    std::ostringstream out;
    EXPECT_EQ(cmd_verify_diagrams(10000, 42, std::nullopt, out), 0);
    EXPECT_EQ(cmd_verify_diagrams(10000, 42, ProcessId::II, out), 3);
    std::ostringstream one;
    EXPECT_EQ(cmd_verify_diagrams(1, 9, std::nullopt, one), 0);
    EXPECT_NE(one.str().find("samples=1 "), std::string::npos);
}

TEST(Binary, ExitCodes)
{
    EXPECT_EQ(run_cli("verify-diagrams -n 1000"), 0);
    EXPECT_EQ(run_cli("verify-diagrams -n 1000 --corrupt-process II"), 3);
    EXPECT_EQ(run_cli(""), 1);
    EXPECT_EQ(run_cli("sweep --set colour=blue"), 1);
    EXPECT_EQ(run_cli("sweep --set mu=1"), 1);
    EXPECT_EQ(run_cli("sweep --set half_extent=200000 --set site_budget=1e6"), 2);
    EXPECT_EQ(run_cli("asymptotic -z 0.5"), 0);
    EXPECT_EQ(run_cli("fit /nonexistent.csv --column x --z-lo 1 --z-hi 2"), 1);
}

TEST(Binary, ConfigFileAndOverride)
{
    const auto cfg = temp_file("run.cfg");
    const auto csv = temp_file("run.csv");
    {
        std::ofstream out(cfg);
        out << "a_tilde = 0.05\nhalf_extent = 10\nz_min = 0.2\nz_max = 2\npoints_per_decade = 8\n";
    }
    ASSERT_EQ(run_cli("sweep -c " + cfg.string() + " --set half_extent=0 -o " + csv.string()), 0);
    std::ifstream in(csv);
    const auto pts = read_column(in, "resonant_direct");
    EXPECT_EQ(pts.size(), 9u);
    EXPECT_EQ(pts.front().value, vertex_term({0.5, 1e-6, unit_z, unit_z}, {0.2}, ShiftKind::resonant));
    std::filesystem::remove(cfg);
    std::filesystem::remove(csv);
}
