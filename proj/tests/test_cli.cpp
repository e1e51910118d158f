#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "heun_gamma/cli.hpp"

namespace fs = std::filesystem;
using namespace heun;
using namespace heun::cli;

namespace {

const char* kMinimal = R"({
  "equation": "SCHE",
  "gamma": [0.7, 0.2], "delta": [-0.3, 0.4], "epsilon": [0.5, -0.25],
  "alpha": [0.35, 0.1], "q": [0.2, -0.15],
  "scheme": "sche-I-origin"
})";

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("heun_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int invoke(const std::string& args, const fs::path& err_file = {}) {
    std::string cmd = std::string(HEUN_CLI_PATH) + " " + args;
    cmd += err_file.empty() ? " 2>/dev/null" : " 2>" + err_file.string();
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string source(const std::string& rel) { return (fs::path(HEUN_SOURCE_DIR) / rel).string(); }

} // namespace

TEST(ParseConfig, MinimalFillsDefaults) {
    const JobConfig cfg = parse_config(kMinimal);
    EXPECT_EQ(cfg.N, 60u);
    EXPECT_DOUBLE_EQ(cfg.tolerance, 1e-8);
    EXPECT_FALSE(cfg.mu.has_value());
    EXPECT_EQ(cfg.variant, Variant::SCHE);
    EXPECT_EQ(cfg.q, cplx(0.2, -0.15));
}

TEST(ParseConfig, ZeroEpsilonQuotesPrecondition) {
    std::string text = kMinimal;
    text.replace(text.find("[0.5, -0.25]"), 12, "[0, 0]");
    try {
        parse_config(text);
        FAIL() << "accepted ε = 0";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("ε ≠ 0"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, UnknownKeyRejected) {
    std::string text = kMinimal;
    text.replace(text.find("\"epsilon\""), 9, "\"epsilonn\"");
    EXPECT_THROW(parse_config(text), ParseError);
    EXPECT_THROW(parse_config(R"({"equation":"SCHE","grid":{"spacing":1}})"), ParseError);
}

TEST(ParseConfig, MalformedReportsLine) {
    try {
        parse_config("{\n  \"equation\": \"SCHE\",\n  \"gamma\": [1, \n}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, MissingFieldNamed) {
    try {
        parse_config(R"({"equation":"SCHE","scheme":"sche-I-origin","gamma":[1,0]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos) << e.what();
    }
}

TEST(ParseConfig, SchemeMustMatchEquation) {
    std::string text = kMinimal;
    text.replace(text.find("sche-I-origin"), 13, "bche-I-origin");
    EXPECT_THROW(parse_config(text), ValidationError);
}

TEST(ParseConfig, RoundTripIsLossless) {
    JobConfig a = parse_config(kMinimal);
    a.mu = cplx(0.0, 0.0);
    a.N = 42;
    a.tolerance = 3.5e-9;
    a.grid.points = {{0.1, 0.2}, {-0.3, 0.05}};
    a.grid.radius = 0.25;
    a.output.samples = "s.csv";
    const JobConfig b = parse_config(config_to_json(a).dump());
    EXPECT_TRUE(a == b);
    const JobConfig c = parse_config(config_to_json(parse_config(kMinimal)).dump(2));
    EXPECT_TRUE(parse_config(kMinimal) == c);
}

TEST(ParseConfig, ShippedConfigsParse) {
    for (const auto& entry : fs::directory_iterator(source("tools/configs")))
        EXPECT_NO_THROW(parse_config(read_file(entry.path()))) << entry.path();
}

TEST(Run, VerifyPassesInProcess) {
    const fs::path out = scratch("verify_inproc");
    JobConfig cfg = parse_config(kMinimal);
    cfg.tolerance = 1e-7;
    EXPECT_EQ(run(Command::Verify, cfg, out), 0);
    const auto rep = json::parse(slurp(out / "report.json"));
    EXPECT_EQ(rep["schema_version"], "1");
    EXPECT_LE(rep["max_error"].get<double>(), 1e-7);
    EXPECT_TRUE(rep["pass"].get<bool>());
}

TEST(Run, SolveWritesHeaderAndRows) {
    const fs::path out = scratch("solve_inproc");
    JobConfig cfg = parse_config(kMinimal);
    cfg.grid.count = 5;
    ASSERT_EQ(run(Command::Solve, cfg, out), 0);
    std::istringstream csv(slurp(out / "samples.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "z_re,z_im,u_re,u_im,uprime_re,uprime_im,residual");
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        const double residual = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_LE(residual, 1e-10);
    }
    EXPECT_EQ(rows, 5);
}

TEST(Cli, VerifyExitCodes) {
    const fs::path out = scratch("verify");
    const std::string cfg = source("tools/configs/sche_origin.json");
    EXPECT_EQ(invoke("verify --config " + cfg + " --out " + out.string()), 0);
    EXPECT_EQ(invoke("verify --config " + cfg + " --out " + out.string() + " --n 3"), 2);
    const auto rep = json::parse(slurp(out / "report.json"));
    EXPECT_FALSE(rep["pass"].get<bool>());
}

TEST(Cli, ErrorsExitOneWithReason) {
    const fs::path out = scratch("errors");
    const fs::path bad = out / "bad.json";
    std::ofstream(bad) << R"({"equation":"SCHE","epsilonn":[1,0]})";
    EXPECT_EQ(invoke("solve --config " + bad.string() + " --out " + out.string(), out / "err.txt"), 1);
    const std::string err = slurp(out / "err.txt");
    EXPECT_EQ(err.rfind("error: ParseError:", 0), 0u) << err;
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
    EXPECT_EQ(invoke("solve --config " + (out / "missing.json").string()), 1);
    EXPECT_EQ(invoke("bogus --config " + source("tools/configs/sche_origin.json")), 1);
}

TEST(Cli, SpecialNamesBiconfluentKummer) {
    const fs::path out = scratch("special");
    ASSERT_EQ(invoke("special --config " + source("tools/configs/bche_special.json") + " --out " + out.string()), 0);
    const auto rep = json::parse(slurp(out / "report.json"));
    EXPECT_TRUE(rep["match"].get<bool>());
    EXPECT_EQ(rep["name"], "biconfluent-kummer");
    EXPECT_EQ(rep["samples"].size(), 3u);
}

TEST(Cli, TerminateAndReductions) {
    const fs::path out = scratch("term");
    ASSERT_EQ(invoke("terminate --config " + source("tools/configs/sche_terminate.json") + " --out " + out.string()), 0);
    const auto term = json::parse(slurp(out / "report.json"));
    EXPECT_GE(term["certified"].size(), 1u);
    for (const auto& r : term["certified"]) EXPECT_LE(r["residual"].get<double>(), 1e-8);

    ASSERT_EQ(invoke("reductions --config " + source("tools/configs/tche_reductions.json") + " --out " + out.string()),
              0);
    const auto red = json::parse(slurp(out / "report.json"));
    EXPECT_EQ(red["effective_terms"], 2);
}

TEST(Cli, SolveMatchesGoldenBytes) {
    const fs::path out = scratch("golden");
    ASSERT_EQ(invoke("solve --config " + source("tests/golden/sche_solve.json") + " --out " + out.string()), 0);
    EXPECT_EQ(slurp(out / "sche_solve.samples.csv"), slurp(source("tests/golden/sche_solve.samples.csv")));
    EXPECT_EQ(slurp(out / "sche_solve.report.json"), slurp(source("tests/golden/sche_solve.report.json")));
}

TEST(Cli, RepeatedRunsAreIdentical) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::string cfg = source("tools/configs/sche_origin.json");
    ASSERT_EQ(invoke("solve --config " + cfg + " --out " + a.string()), 0);
    ASSERT_EQ(invoke("solve --config " + cfg + " --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "samples.csv"), slurp(b / "samples.csv"));
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
}
