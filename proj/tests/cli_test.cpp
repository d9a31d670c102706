#include "kmreg/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kmreg/io.hpp"

namespace fs = std::filesystem;
using namespace kmreg;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result run_tool(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + KMREG_TOOL_PATH + std::string(" ") + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("kmreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& name, const std::string& body) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << body;
        return p.string();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

const char* kParabolicMode = R"({
  "schema_version": 1,
  "domain": {"lx": 1, "ly": 1, "nx": 17, "ny": 17},
  "basis": {"kmax": 4},
  "problem": {"method": "parabolic", "T": 0.625, "a2": 2, "gamma": 2},
  "ground_truth": {"kind": "mode", "k": 1, "m": 1},
  "experiment": {"checkpoints": [10, 100, 1000, 10000, 100000]}
})";

const char* kParabolicComposite = R"({
  "schema_version": 1,
  "domain": {"nx": 17, "ny": 17},
  "basis": {"kmax": 4},
  "problem": {"method": "parabolic", "T": 0.625, "a2": 2, "gamma": 2},
  "ground_truth": [{"kind": "bump", "center": [0.4, 0.5], "width": 0.15}, {"kind": "mode", "k": 1, "m": 2}],
  "experiment": {"checkpoints": [10, 100, 1000, 10000, 100000]}
})";

std::string parabolic_gamma(double gamma) {
    std::ostringstream os;
    os.precision(17);
    os << R"({"schema_version": 1, "domain": {"nx": 17, "ny": 17}, "basis": {"kmax": 4},
              "problem": {"method": "parabolic", "T": 0.625, "a2": 2, "gamma": )"
       << gamma << R"(}, "ground_truth": {"kind": "mode"}})";
    return os.str();
}

std::string read_file(const std::string& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

// --- forward -------------------------------------------------------------------

TEST_F(CliTest, ForwardZeroTruthWritesZeroGrid) {
    const auto cfg = write_config("zero.json", R"({"schema_version": 1, "domain": {"nx": 9, "ny": 9},
                                                  "basis": {"kmax": 4}, "problem": {"method": "elliptic"}})");
    const Result r = run_tool("forward --config " + cfg + " --t 0.3 --out " + path("u.grid"));
    ASSERT_EQ(r.code, 0) << r.output;
    const GridField g = io::load_grid(path("u.grid"));
    EXPECT_EQ(g.max_abs(), 0.0);
}

TEST_F(CliTest, ForwardParabolicSingleModeMatchesScalarFormula) {
    const auto cfg = write_config("p.json", kParabolicMode);
    const Result r = run_tool("forward --config " + cfg + " --t 0.625 --out " + path("u.grid"));
    ASSERT_EQ(r.code, 0) << r.output;
    const GridField g = io::load_grid(path("u.grid"));
    const double amp = std::exp(-0.625 * std::numbers::pi * std::numbers::pi);
    for (std::size_t j = 0; j < 17; ++j) {
        for (std::size_t i = 0; i < 17; ++i) {
            const double x = i / 16.0, y = j / 16.0;
            EXPECT_NEAR(g(i, j), amp * std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y), 1e-15);
        }
    }
}

TEST_F(CliTest, ForwardDumpParsesBackIdentically) {
    const auto cfg = write_config("p.json", kParabolicComposite);
    ASSERT_EQ(run_tool("forward --config " + cfg + " --t 0.1 --out " + path("u.grid")).code, 0);
    const std::string text = read_file(path("u.grid"));
    std::ostringstream again;
    io::write_grid(again, io::load_grid(path("u.grid")));
    EXPECT_EQ(again.str(), text);
}

TEST_F(CliTest, ForwardOverflowIsSolverErrorNamingLambda) {
    const auto cfg = write_config("e.json", R"({"schema_version": 1, "domain": {"nx": 9, "ny": 9}, "basis": {"kmax": 4},
        "problem": {"method": "elliptic"}, "ground_truth": {"kind": "mode", "k": 4, "m": 4}})");
    const Result r = run_tool("forward --config " + cfg + " --t 100 --out " + path("u.grid"));
    EXPECT_EQ(r.code, 3) << r.output;
    EXPECT_NE(r.output.find("lambda="), std::string::npos) << r.output;
}

TEST_F(CliTest, ForwardUsesOutputDirectoryOverride) {
    const auto cfg = write_config("p.json", kParabolicMode);
    const Result r = run_tool("forward --config " + cfg + " --t 0.1", "KMREG_OUT_DIR=" + path("env"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(path("env/forward.grid")));
}

// --- reconstruct ---------------------------------------------------------------

TEST_F(CliTest, ReconstructWritesDecreasingReport) {
    const auto cfg = write_config("p.json", kParabolicComposite);
    const Result r = run_tool("reconstruct --config " + cfg + " --out " + path("out"));
    ASSERT_EQ(r.code, 0) << r.output;
    std::istringstream csv(read_file(path("out/report.csv")));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "step,rel_error_percent,increment_norm,wall_ms");
    std::vector<double> errors;
    while (std::getline(csv, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        errors.push_back(io::parse_double(line.substr(a + 1, b - a - 1)));
    }
    ASSERT_EQ(errors.size(), 5u);
    for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_LT(errors[i], errors[i - 1]);
    EXPECT_TRUE(fs::exists(path("out/reconstruction.grid")));
    EXPECT_TRUE(fs::exists(path("out/error.grid")));
    // one log line per checkpoint
    std::size_t lines = 0;
    for (char c : r.output) lines += c == '\n';
    EXPECT_EQ(lines, 5u);
}

TEST_F(CliTest, ReconstructDumpsEveryCheckpointDeterministically) {
    const auto cfg = write_config("p.json", kParabolicComposite);
    ASSERT_EQ(run_tool("reconstruct --config " + cfg + " --dump-checkpoints --out " + path("a")).code, 0);
    ASSERT_EQ(run_tool("reconstruct --config " + cfg + " --dump-checkpoints --out " + path("b")).code, 0);
    for (const char* step : {"10", "100", "1000", "10000", "100000"}) {
        const std::string e = std::string("error_") + step + ".grid";
        EXPECT_TRUE(fs::exists(path("a/" + e))) << e;
        EXPECT_EQ(read_file(path("a/" + e)), read_file(path("b/" + e))) << e;
        const std::string rec = std::string("reconstruction_") + step + ".grid";
        EXPECT_EQ(read_file(path("a/" + rec)), read_file(path("b/" + rec))) << rec;
    }
}

TEST_F(CliTest, ReconstructZeroTruthReportsZeroError) {
    const auto cfg = write_config("z.json", R"({"schema_version": 1, "domain": {"nx": 9, "ny": 9}, "basis": {"kmax": 4},
        "problem": {"method": "parabolic"}, "experiment": {"checkpoints": [1, 10]}})");
    ASSERT_EQ(run_tool("reconstruct --config " + cfg + " --out " + path("out")).code, 0);
    EXPECT_EQ(read_file(path("out/report.csv")).find("step,rel_error_percent,increment_norm,wall_ms\n1,0,0,"), 0u);
}

TEST_F(CliTest, ReconstructRejectsGammaOverBound) {
    const double bound = 2.0 * std::exp(0.625 * std::numbers::pi * std::numbers::pi);
    const auto cfg = write_config("g.json", parabolic_gamma(bound * (1 + 1e-6)));
    const Result r = run_tool("reconstruct --config " + cfg + " --out " + path("out"));
    EXPECT_EQ(r.code, 4) << r.output;
    EXPECT_NE(r.output.find("non-expansive bound"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("injectivity bound"), std::string::npos) << r.output;
}

// --- check ---------------------------------------------------------------------

TEST_F(CliTest, CheckEllipticPasses) {
    const auto cfg = write_config("e.json", R"({"schema_version": 1, "problem": {"method": "elliptic", "T": 2.5}})");
    const Result r = run_tool("check --config " + cfg);
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("PASS"), std::string::npos);
}

TEST_F(CliTest, CheckHyperbolicResonanceFlagged) {
    // lx = ly = sqrt(2), T = 1: lambda_{k,k} T = k pi.
    const auto cfg = write_config("h.json", R"({"schema_version": 1,
        "domain": {"lx": 1.4142135623730951, "ly": 1.4142135623730951, "nx": 9, "ny": 9}, "basis": {"kmax": 2},
        "problem": {"method": "hyperbolic", "T": 1}})");
    const Result r = run_tool("check --config " + cfg);
    EXPECT_EQ(r.code, 5) << r.output;
    EXPECT_NE(r.output.find("resonant mode (1,1)"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("resonant mode (2,2)"), std::string::npos) << r.output;
    EXPECT_EQ(r.output.find("resonant mode (1,2)"), std::string::npos) << r.output;
}

TEST_F(CliTest, CheckParabolicGammaBoundary) {
    const double bound = 2.0 * std::exp(0.625 * std::numbers::pi * std::numbers::pi);
    const Result below = run_tool("check --config " + write_config("lo.json", parabolic_gamma(bound * (1 - 1e-6))));
    EXPECT_EQ(below.code, 0) << below.output;
    const Result above = run_tool("check --config " + write_config("hi.json", parabolic_gamma(bound * (1 + 1e-6))));
    EXPECT_EQ(above.code, 5) << above.output;
    EXPECT_NE(above.output.find("954.94135"), std::string::npos) << above.output;
}

// --- equivalence ---------------------------------------------------------------

TEST_F(CliTest, EquivalencePassesAndZeroStepIsExact) {
    const auto cfg = write_config("p.json", kParabolicComposite);
    const Result r = run_tool("equivalence --config " + cfg + " --k 0,1,5,37");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("k,max_rel_discrepancy,result\n0,0,pass\n"), std::string::npos) << r.output;
}

TEST_F(CliTest, EquivalenceCorruptedMultiplierFails) {
    const auto cfg = write_config("p.json", kParabolicComposite);
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_equivalence(cfg, {5, 37}, out, err, 1e-6), cli::kDiagnosticFlag);
    EXPECT_NE(out.str().find("fail"), std::string::npos);
}

TEST_F(CliTest, EquivalenceRejectsLargeK) {
    const auto cfg = write_config("p.json", kParabolicComposite);
    EXPECT_EQ(run_tool("equivalence --config " + cfg + " --k 1001").code, 2);
}

// --- usage errors --------------------------------------------------------------

TEST_F(CliTest, UsageAndConfigErrorsExitTwo) {
    EXPECT_EQ(run_tool("").code, 2);
    EXPECT_EQ(run_tool("frobnicate").code, 2);
    EXPECT_EQ(run_tool("check").code, 2);
    EXPECT_EQ(run_tool("check --config " + path("missing.json")).code, 2);
    EXPECT_EQ(run_tool("check --config " + write_config("bad.json", "{\"schema_version\": 1, \"oops\": 1}")).code, 2);
    EXPECT_EQ(run_tool("forward --config " + write_config("p.json", kParabolicMode) + " --t abc").code, 2);
}
