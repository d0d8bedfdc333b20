#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "experiment.hpp"
#include "mixtopo/error.hpp"

using namespace mixtopo;
using namespace mixtopo::cli;

namespace {

bool mentions(const std::vector<Diagnostic>& diags, const std::string& field) {
    for (const auto& d : diags)
        if (d.field == field) return true;
    return false;
}

ExperimentConfig config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Validate, MissingBetaNamesTheField) {
    const auto d = validate(config("uhlmann-chern"));
    EXPECT_TRUE(mentions(d, "beta"));
}

TEST(Validate, BadAxisIsReported) {
    ExperimentConfig c = config("phase-profile");
    c.beta = 1.3;
    c.axis = "z";
    const auto d = validate(c);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].field, "axis");
}

TEST(Validate, OtherDiagnostics) {
    EXPECT_TRUE(mentions(validate(config("")), "experiment"));
    EXPECT_TRUE(mentions(validate(config("nonsense")), "experiment"));
    EXPECT_TRUE(mentions(validate(config("beta-scan")), "beta-bracket"));
    ExperimentConfig c = config("chern");
    c.grid = std::make_pair(0, 10);
    c.format = "xml";
    c.model = "/no/such/file.model";
    c.loop_points = 1;
    const auto d = validate(c);
    for (const char* f : {"grid", "format", "model", "loop-points"}) EXPECT_TRUE(mentions(d, f)) << f;
    ExperimentConfig s = config("uhlmann-chern");
    s.beta = 1.0;
    s.subspace = 2;
    EXPECT_TRUE(mentions(validate(s), "subspace"));
}

TEST(Validate, ShippedConfigsAreClean) {
    for (const auto& entry : std::filesystem::directory_iterator(MIXTOPO_SOURCE_DIR "/configs")) {
        if (entry.path().extension() != ".conf") continue;
        const auto d = validate(load_config(entry.path().string()));
        EXPECT_TRUE(d.empty()) << entry.path() << ": " << (d.empty() ? "" : d.front().message);
    }
}

TEST(Config, TextRoundTrip) {
    ExperimentConfig c = config("beta-scan");
    c.model = "configs/aniso_qah.model";
    c.beta_bracket = std::make_pair(0.5, 2.0);
    c.grid = std::make_pair(30, 40);
    c.axis = "y";
    c.footpoint = 0.1234567890123;
    c.floor = 1e-10;
    c.out = "/tmp/x.csv";
    c.format = "json";
    c.threads = 3;
    EXPECT_EQ(parse_config(to_config_text(c)), c);
    EXPECT_EQ(parse_config(to_config_text(ExperimentConfig{})), ExperimentConfig{});
}

TEST(Config, JsonEchoRoundTrip) {
    ExperimentConfig c = config("uhlmann-chern");
    c.beta = 1.3;
    c.grid = std::make_pair(12, 12);
    c.subspace = 1;
    const ResultEnvelope env = run(c);
    const auto j = to_json(env);
    EXPECT_EQ(config_from_json(j.at("config")), c);
    EXPECT_EQ(config_from_json(nlohmann::json::parse(j.dump())["config"]), c);
}

TEST(Config, ParseErrorsCiteLine) {
    try {
        parse_config("experiment = chern\nbeta = hot\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(parse_config("colour = red\n"), ParseError);
    EXPECT_THROW(parse_config("grid = 10\n"), ParseError);
}

TEST(Run, ChernReportsMinusOne) {
    ExperimentConfig c = config("chern");
    const auto env = run(c);
    ASSERT_EQ(env.reports.size(), 1u);
    EXPECT_EQ(env.reports[0].value, -1.0);
    EXPECT_EQ(env.reports[0].grid.nx, 200);
    const std::string csv = reports_csv(env.reports);
    EXPECT_EQ(csv.rfind("name,value,raw,tolerance,nx,ny,loop_points,slow_count,kx,ky\n", 0), 0u);
    EXPECT_NE(csv.find("chern_pure,-1,"), std::string::npos);
}

TEST(Run, PhaseProfileCsvSchema) {
    ExperimentConfig c = config("phase-profile");
    c.beta = 1.3;
    c.loop_points = 100;
    c.slow_count = 40;
    const auto env = run(c);
    const std::string csv = render(env);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,phi_u");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 40);
    EXPECT_NE(csv.find("-3.14159265359,"), std::string::npos);  // 12 significant digits
}

TEST(Run, DeterministicResults) {
    ExperimentConfig c = config("gap-scan");
    c.beta = 1.3;
    c.grid = std::make_pair(5, 5);
    c.loop_points = 100;
    c.format = "json";
    const auto a = to_json(run(c), false).dump();
    const auto b = to_json(run(c), false).dump();
    EXPECT_EQ(a, b);
}

TEST(Run, InvalidConfigThrowsConfigError) {
    EXPECT_THROW(run(config("uhlmann-wind")), ConfigError);
}

TEST(Run, WritesOutputFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "mixtopo_cli_test";
    std::filesystem::create_directories(dir);
    ExperimentConfig c = config("band-sum");
    c.beta = 1.3;
    c.grid = std::make_pair(20, 20);
    c.out = (dir / "bands.csv").string();
    write_outputs(run(c));
    const std::string text = slurp(dir / "bands.csv");
    EXPECT_NE(text.find("chern_level(0),-1,"), std::string::npos);
    EXPECT_NE(text.find("chern_level(1),1,"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(ExitCodes, DistinctPerFailureClass) {
    EXPECT_EQ(exit_code_for(ConfigError(std::vector<Diagnostic>{{"beta", "required"}})), kConfigError);
    EXPECT_EQ(exit_code_for(ParseError("bad", 3)), kConfigError);
    EXPECT_EQ(exit_code_for(SpectralConstraintViolated("x")), kSpectralConstraint);
    EXPECT_EQ(exit_code_for(RankDeficient("x")), kSpectralConstraint);
    EXPECT_EQ(exit_code_for(GapClosed("x")), kSpectralConstraint);
    EXPECT_EQ(exit_code_for(UnderResolved("x")), kUnderResolved);
    EXPECT_EQ(exit_code_for(PlaquetteOverflow("x")), kUnderResolved);
    EXPECT_EQ(exit_code_for(NoTransition("x")), kNoTransition);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), kFailure);
}

TEST(ExitCodes, SpectralViolationIsNotSuccess) {
    ExperimentConfig c = config("uhlmann-chern");
    c.beta = 0.0;
    c.grid = std::make_pair(10, 10);
    try {
        run(c);
        FAIL();
    } catch (const std::exception& e) {
        EXPECT_EQ(exit_code_for(e), kSpectralConstraint);
    }
}
