#include "cohom/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace cohom;

namespace {

struct CliRun {
    int code;
    std::string out, err;
    Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cohom_cli_" + name)).string();
}

} // namespace

TEST(Cli, ClassifyReportsFamilies) {
    CliRun r = run({"classify"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_EQ(j["command"], "classify");
    EXPECT_EQ(j["options"]["bound"], 3);
    EXPECT_EQ(j["result"]["ricci_flat_families"].size(), 3u);
    EXPECT_EQ(j["result"]["einstein_families"].size(), 1u);
    EXPECT_EQ(j["result"]["einstein_families"][0], Json::parse(R"(["2/1","0/1","-1/1","0/1","1/1","0/1"])"));
}

TEST(Cli, VerifyPasses) {
    for (std::string form : {"taub-nut", "eguchi-hanson", "fubini-study", "fubini-study-hyperbolic", "case3", "flat-cone"}) {
        CliRun r = run({"verify", "--form", form});
        ASSERT_EQ(r.code, 0) << form << ": " << r.err;
        Json j = r.json();
        EXPECT_TRUE(j["result"]["ode_residual_ok"].get<bool>()) << form;
        EXPECT_TRUE(j["result"]["ricci_residual_ok"].get<bool>()) << form;
        EXPECT_FALSE(j.contains("rows"));
    }
}

TEST(Cli, CatalogRows) {
    CliRun r = run({"catalog", "--form", "taub-nut", "--points", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_EQ(j["rows"].size(), 7u);
    EXPECT_EQ(j["columns"][0], "r");
}

TEST(Cli, RicciOfOneJet) {
    CliRun r = run({"ricci", "--a1", "1", "--a2", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_DOUBLE_EQ(j["result"]["ric00"].get<double>(), 0);
    EXPECT_DOUBLE_EQ(j["result"]["ric11"].get<double>(), 4);
    EXPECT_DOUBLE_EQ(j["result"]["ric22"].get<double>(), 4);
}

TEST(Cli, IntegrateReachesEnd) {
    CliRun r = run({"integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_EQ(j["options"]["params"], Json::parse(R"(["1/1","0/1","0/1","0/1","-1/1","2/1"])"));
    EXPECT_DOUBLE_EQ(j["options"]["t_end"].get<double>(), 3);
    EXPECT_DOUBLE_EQ(j["options"]["tol"].get<double>(), 1e-10);
    const auto& last = j["rows"].back();
    EXPECT_NEAR(last[0].get<double>(), 3, 1e-12);
    EXPECT_NEAR(last[1].get<double>(), 4, 1e-8);
}

TEST(Cli, IntegrateSingularExitsThree) {
    CliRun r = run({"integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "-5"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("singular_event (t0 ~ -0.99999999"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("collapse"), std::string::npos);
    EXPECT_FALSE(r.out.empty());
}

TEST(Cli, AsymptoteSingular) {
    CliRun r = run({"asymptote", "--mode", "singular", "--tol", "1e-12", "--window-lo", "1e-10", "--window-hi", "1e-6"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_NEAR(j["result"]["a2_fit"]["exponent"].get<double>(), 1.0 / 3, 1e-3);
    EXPECT_NEAR(j["result"]["a1_fit"]["exponent"].get<double>(), -1.0 / 3, 1e-3);
    EXPECT_NEAR(j["result"]["a1_coefficient_ratio"].get<double>(), 1, 0.05);
}

TEST(Cli, AsymptoteInfinity) {
    CliRun r = run({"asymptote", "--mode", "infinity"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_EQ(j["result"]["alc"]["label"], "ALC");
    EXPECT_NEAR(j["result"]["a2_over_2t"].get<double>(), 1, 1e-2);
}

TEST(Cli, ValidationErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"classify", "--nope"}).code, 2);
    EXPECT_EQ(run({"classify", "--bound", "2"}).code, 2);
    EXPECT_EQ(run({"verify", "--form", "klein"}).code, 2);
    EXPECT_EQ(run({"verify"}).code, 2);
    EXPECT_EQ(run({"integrate", "--params", "1,0,0", "--init", "1,1", "--t-end", "1"}).code, 2);
    EXPECT_EQ(run({"integrate", "--params", "0,0,0,0,0,0", "--init", "1,1", "--t-end", "1"}).code, 2);
    EXPECT_EQ(run({"integrate", "--params", "1,0,0,0,-1,2", "--init", "-1,1", "--t-end", "1"}).code, 2);
    EXPECT_EQ(run({"integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "1", "--tol", "0.1"}).code, 2);
    EXPECT_EQ(run({"integrate", "--params", "1,0,0,0,-1,2", "--init", "1,nan", "--t-end", "1"}).code, 2);
    EXPECT_EQ(run({"asymptote", "--mode", "sideways"}).code, 2);
    EXPECT_EQ(run({"classify", "--format", "xml"}).code, 2);
    CliRun r = run({"integrate", "--params", "1,0,0,0,-1,x", "--init", "1,1", "--t-end", "1"});
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, HelpExitsZero) {
    CliRun r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("classify"), std::string::npos);
    EXPECT_EQ(run({"integrate", "--help"}).code, 0);
}

TEST(Cli, DeterministicOutput) {
    std::vector<std::string> args{"integrate", "--params", "2,0,-1,0,1,0", "--init", "0.4,0.2", "--t-end", "0.5", "--t0", "0.2"};
    CliRun a = run(args), b = run(args);
    EXPECT_EQ(a.out, b.out);
    Json one = run({"classify", "--workers", "1"}).json(), two = run({"classify", "--workers", "2"}).json();
    EXPECT_EQ(one["result"], two["result"]);
}

TEST(Cli, CsvAndTableFormats) {
    CliRun c = run({"catalog", "--form", "fubini-study", "--points", "3", "--format", "csv"});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_NE(c.out.find("# command=catalog\n"), std::string::npos) << c.out;
    EXPECT_NE(c.out.find("# options.form=fubini-study\n"), std::string::npos);
    EXPECT_NE(c.out.find("\nt,"), std::string::npos);
    EXPECT_EQ(c.out.find(';'), std::string::npos);
    CliRun t = run({"ricci", "--a1", "1", "--a2", "1", "--format", "table"});
    ASSERT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("result.ric11 = 4"), std::string::npos) << t.out;
    CliRun k = run({"ricci", "--a1", "1", "--a2", "1", "--format", "csv"});
    EXPECT_NE(k.out.find("result.ric22,4"), std::string::npos) << k.out;
}

TEST(Cli, OutputFile) {
    const std::string path = temp_path("out.json");
    std::remove(path.c_str());
    CliRun r = run({"ricci", "--a1", "2", "--a2", "1", "--output", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    Json j = Json::parse(in);
    EXPECT_EQ(j["command"], "ricci");
    std::remove(path.c_str());
}

TEST(Cli, ConfigFileWithOverride) {
    const std::string path = temp_path("run.cfg");
    {
        std::ofstream cfg(path);
        cfg << "# integrate the cone\nsubcommand = integrate\nparams = 1,0,0,0,-1,2\ninit = 1,1\nt-end = 2\ntol = 1e-9\n";
    }
    CliRun a = run({"--config", path});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_DOUBLE_EQ(a.json()["options"]["t_end"].get<double>(), 2);
    EXPECT_DOUBLE_EQ(a.json()["options"]["tol"].get<double>(), 1e-9);
    CliRun b = run({"integrate", "--config=" + path, "--t-end", "4"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_DOUBLE_EQ(b.json()["options"]["t_end"].get<double>(), 4);
    EXPECT_EQ(run({"--config", temp_path("missing.cfg")}).code, 2);
    {
        std::ofstream cfg(path);
        cfg << "no equals sign here\n";
    }
    EXPECT_EQ(run({"integrate", "--config", path}).code, 2);
    std::remove(path.c_str());
}

TEST(Cli, ParseHelpers) {
    EXPECT_DOUBLE_EQ(cli::parse_real(" 2.5 "), 2.5);
    EXPECT_DOUBLE_EQ(cli::parse_real("+1e-3"), 1e-3);
    EXPECT_THROW(cli::parse_real("inf"), InvalidArgument);
    EXPECT_THROW(cli::parse_real("1,5"), InvalidArgument);
    ParamSet p = cli::parse_params("1/2,0,0.25,0,-1,2");
    EXPECT_EQ(p.values[0], Rational(1) / Rational(2));
    EXPECT_EQ(p.values[2], Rational(1) / Rational(4));
    EXPECT_THROW(cli::parse_params("1,2,3,4,5,"), InvalidArgument);
}
