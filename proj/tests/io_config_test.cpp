#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kmreg/config.hpp"
#include "kmreg/errors.hpp"
#include "kmreg/io.hpp"

using namespace kmreg;

namespace {

const char* kMinimal = R"({"schema_version": 1, "problem": {"method": "parabolic"}})";

std::string with_problem(const std::string& problem) {
    return std::string(R"({"schema_version": 1, "problem": )") + problem + "}";
}

}  // namespace

// --- numbers -------------------------------------------------------------------

TEST(FormatDouble, RoundTripsBitExact) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 10000; ++n) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 600) - 300);
        const double back = io::parse_double(io::format_double(v));
        EXPECT_EQ(std::memcmp(&v, &back, sizeof v), 0) << io::format_double(v);
    }
    for (double v : {0.0, -0.0, 1.0, 0.1, std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max()}) {
        const double back = io::parse_double(io::format_double(v));
        EXPECT_EQ(std::memcmp(&v, &back, sizeof v), 0);
    }
}

TEST(FormatDouble, NonFiniteAndLocaleFree) {
    EXPECT_EQ(io::format_double(INFINITY), "inf");
    EXPECT_EQ(io::format_double(-INFINITY), "-inf");
    EXPECT_EQ(io::format_double(NAN), "nan");
    EXPECT_EQ(io::format_double(0.5), "0.5");
    EXPECT_EQ(io::format_double(1e-20), "9.9999999999999995e-21");
}

TEST(ParseDouble, RejectsPartialTokens) {
    EXPECT_THROW(io::parse_double("1.5x"), UsageError);
    EXPECT_THROW(io::parse_double(""), UsageError);
    EXPECT_THROW(io::parse_double("1,5"), UsageError);
    EXPECT_EQ(io::parse_double("-2.5e3"), -2500.0);
}

// --- grid dumps ----------------------------------------------------------------

TEST(GridDump, HeaderAndLayout) {
    const RectDomain d{2.0, 0.5, 4, 3};
    std::vector<double> v(12, 0.0);
    v[1 * 4 + 1] = 0.25;
    v[1 * 4 + 2] = -1.0 / 3.0;
    const GridField g(d, v);
    std::ostringstream os;
    io::write_grid(os, g);
    EXPECT_EQ(os.str(), "# 4 3 2 0.5\n0 0 0 0\n0 0.25 -0.33333333333333331 0\n0 0 0 0\n");
}

TEST(GridDump, RoundTripIsIdentical) {
    const RectDomain d{1.0, 1.3, 21, 13};
    const GridField g = GridField::sample(d, [](double x, double y) { return std::exp(x) * std::sin(7.0 * y) / 3.0; });
    std::stringstream ss;
    io::write_grid(ss, g);
    const GridField back = io::read_grid(ss);
    EXPECT_EQ(back.domain(), d);
    for (std::size_t n = 0; n < g.values().size(); ++n) EXPECT_EQ(back.values()[n], g.values()[n]);
}

TEST(GridDump, MalformedInputRejected) {
    std::istringstream no_header("1 2 3\n");
    EXPECT_THROW(io::read_grid(no_header), UsageError);
    std::istringstream short_row("# 3 3 1 1\n0 0 0\n0 0\n0 0 0\n");
    EXPECT_THROW(io::read_grid(short_row), UsageError);
    std::istringstream missing_rows("# 3 3 1 1\n0 0 0\n");
    EXPECT_THROW(io::read_grid(missing_rows), UsageError);
    std::istringstream bad_value("# 3 3 1 1\n0 0 0\n0 abc 0\n0 0 0\n");
    EXPECT_THROW(io::read_grid(bad_value), UsageError);
}

TEST(ReportCsv, HeaderAndRows) {
    const auto basis = build_basis({1.0, 1.0, 5, 5}, 2, 1.0);
    RunReport r{ExperimentConfig{}, SpectralField(basis), {}};
    r.rows.push_back({10, 12.5, 0.25, 1.0, SpectralField(basis), std::nullopt});
    r.rows.push_back({100, 0.5, 1e-3, 2.0, SpectralField(basis), std::nullopt});
    std::ostringstream os;
    io::write_report_csv(os, r);
    EXPECT_EQ(os.str(), "step,rel_error_percent,increment_norm,wall_ms\n10,12.5,0.25,1\n100,0.5,0.001,2\n");
}

// --- config --------------------------------------------------------------------

TEST(Config, MinimalUsesDefaults) {
    const ExperimentConfig c = config::parse(kMinimal);
    EXPECT_EQ(c.method, MethodKind::parabolic);
    EXPECT_EQ(c.kmax, 8u);
    EXPECT_EQ(c.domain.nx, 33u);
    EXPECT_DOUBLE_EQ(c.t_end, 0.625);
    EXPECT_DOUBLE_EQ(c.a2, 2.0);
    EXPECT_DOUBLE_EQ(c.gamma, 2.0);
    EXPECT_TRUE(c.ground_truth.empty());
}

TEST(Config, FullDocumentRoundTrips) {
    const std::string text = R"({
      "schema_version": 1,
      "domain": {"lx": 1.5, "ly": 1.0, "nx": 25, "ny": 17},
      "basis": {"kmax": 6},
      "problem": {"method": "hyperbolic", "T": 0.5, "resonance_tol": 1e-6},
      "ground_truth": [
        {"kind": "bump", "center": [0.3, 0.6], "width": 0.1, "amplitude": 2.0},
        {"kind": "piecewise", "x": [0.1, 0.4], "y": [0.2, 0.9]},
        {"kind": "mode", "k": 3, "m": 2, "amplitude": -0.5}
      ],
      "initial_rate": {"kind": "mode", "k": 1, "m": 1},
      "experiment": {"noise_level": 0.01, "seed": 42, "checkpoints": [1, 10, 100], "cross_validate_up_to": 10}
    })";
    const ExperimentConfig c = config::parse(text);
    EXPECT_EQ(c.method, MethodKind::hyperbolic);
    EXPECT_EQ(c.domain, (RectDomain{1.5, 1.0, 25, 17}));
    EXPECT_EQ(c.kmax, 6u);
    ASSERT_EQ(c.ground_truth.size(), 3u);
    EXPECT_EQ(c.ground_truth[0].kind, ProfileComponent::Kind::bump);
    EXPECT_DOUBLE_EQ(c.ground_truth[0].center_y, 0.6);
    EXPECT_DOUBLE_EQ(c.ground_truth[1].y1, 0.9);
    EXPECT_EQ(c.ground_truth[2].k, 3u);
    ASSERT_EQ(c.initial_rate.size(), 1u);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.checkpoints, (std::vector<std::uint64_t>{1, 10, 100}));

    const ExperimentConfig again = config::parse(config::dump(c));
    EXPECT_EQ(config::dump(again), config::dump(c));
}

TEST(Config, RejectsUnknownKeysEverywhere) {
    EXPECT_THROW(config::parse(R"({"schema_version": 1, "problem": {"method": "parabolic"}, "extra": 1})"),
                 ConfigError);
    EXPECT_THROW(config::parse(with_problem(R"({"method": "parabolic", "beta": 1})")), ConfigError);
    EXPECT_THROW(config::parse(R"({"schema_version": 1, "problem": {"method": "parabolic"},
                                   "ground_truth": {"kind": "mode", "n": 1}})"),
                 ConfigError);
}

TEST(Config, RejectsInvalidValues) {
    EXPECT_THROW(config::parse("not json"), ConfigError);
    EXPECT_THROW(config::parse(R"({"problem": {"method": "parabolic"}})"), ConfigError);
    EXPECT_THROW(config::parse(R"({"schema_version": 2, "problem": {"method": "parabolic"}})"), ConfigError);
    EXPECT_THROW(config::parse(R"({"schema_version": 1})"), ConfigError);
    EXPECT_THROW(config::parse(with_problem(R"({"method": "wave"})")), ConfigError);
    EXPECT_THROW(config::parse(with_problem(R"({"method": "parabolic", "T": -1})")), ConfigError);
    EXPECT_THROW(config::parse(with_problem(R"({"method": "parabolic", "a2": 0})")), ConfigError);
    EXPECT_THROW(config::parse(with_problem(R"({"method": "parabolic", "T": "soon"})")), ConfigError);
    // kmax too large for the grid
    EXPECT_THROW(config::parse(R"({"schema_version": 1, "problem": {"method": "elliptic"},
                                   "domain": {"nx": 9, "ny": 9}, "basis": {"kmax": 8}})"),
                 ConfigError);
    // profile mode outside the basis
    EXPECT_THROW(config::parse(R"({"schema_version": 1, "problem": {"method": "elliptic"},
                                   "basis": {"kmax": 4}, "ground_truth": {"kind": "mode", "k": 5, "m": 1}})"),
                 ConfigError);
}

TEST(Config, LoadMissingFile) {
    EXPECT_THROW(config::load("/nonexistent/kmreg.json"), ConfigError);
}
