#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "allee/cli.hpp"

using allee::json;
using allee::cli::run_cli;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> base(const std::string& beta) {
    return {"--alpha", "0.4", "--beta", beta, "--gamma", "1", "--mu", "0.6", "--d0", "0.5"};
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "allee_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kNuText = "8.3971143170299739104";

}  // namespace

// --------------------------------------------------------------------------- fixed-points

TEST(CliFixedPoints, AboveThreshold) {
    const CliRun r = run(with({"fixed-points"}, base("9")));
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["fixed_points"].size(), 3u);
    EXPECT_EQ(j["fixed_points"][0]["stability"]["fp_type"], "Attracting");
    EXPECT_EQ(j["fixed_points"][1]["stability"]["fp_type"], "Saddle");
    EXPECT_FALSE(j["fixed_points"][1]["stability"]["notes"].empty());
    EXPECT_EQ(j["fixed_points"][2]["stability"]["fp_type"], "Attracting");
    EXPECT_EQ(j["params"]["beta"], 9.0);
    EXPECT_EQ(j["existence"]["regime"], "AboveThreshold");
    EXPECT_EQ(json::parse(r.out).dump(2) + "\n", r.out);
}

TEST(CliFixedPoints, BelowThresholdAndFlagsAfterSubcommand) {
    const CliRun r = run({"fixed-points", "--alpha", "0.4", "--beta", "8", "--gamma", "1", "--mu", "0.6", "--d0", "0.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    ASSERT_EQ(j["fixed_points"].size(), 1u);
    EXPECT_EQ(j["fixed_points"][0]["stability"]["fp_type"], "Attracting");
}

TEST(CliFixedPoints, MissingFlagIsUsageError) {
    const CliRun r = run({"fixed-points", "--alpha", "0.4", "--beta", "9"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--gamma"), std::string::npos);
}

TEST(CliFixedPoints, ViolatedConditionNamedOnStderr) {
    const CliRun r = run({"fixed-points", "--alpha", "0.7", "--beta", "9", "--gamma", "1", "--mu", "0.6", "--d0", "0.5"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("alpha+d0<=1"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(CliFixedPoints, CsvFormat) {
    const CliRun r = run(with({"fixed-points", "--format", "csv"}, base("9")));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# alpha=0.4", 0), 0u);
    EXPECT_NE(r.out.find("\nLower,0.59999999999999"), std::string::npos);
    EXPECT_NE(r.out.find(",Saddle,iii.2\n"), std::string::npos);
}

TEST(CliUsage, UnknownSubcommandAndBadFormat) {
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run(with({"fixed-points", "--format", "xml"}, base("9"))).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliConfig, FileMergedUnderFlags) {
    const auto path = scratch("config.json");
    std::ofstream(path) << R"({"alpha": 0.4, "beta": 8, "gamma": 1, "mu": 0.6, "d0": 0.5})";
    const CliRun from_file = run({"fixed-points", "--config", path.string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(json::parse(from_file.out)["fixed_points"].size(), 1u);
    const CliRun flag_wins = run({"fixed-points", "--config", path.string(), "--beta", "9"});
    ASSERT_EQ(flag_wins.code, 0);
    EXPECT_EQ(json::parse(flag_wins.out)["fixed_points"].size(), 3u);
}

TEST(CliConfig, BadConfigIsUsageError) {
    const auto path = scratch("bad.json");
    std::ofstream(path) << "{ not json";
    EXPECT_EQ(run({"fixed-points", "--config", path.string()}).code, 2);
    EXPECT_EQ(run({"fixed-points", "--config", scratch("missing.json").string()}).code, 2);
}

// --------------------------------------------------------------------------- trajectory

TEST(CliTrajectory, ExampleTwoPoint) {
    const CliRun r = run(with({"trajectory", "--x0", "0.5", "--y0", "0.66"}, base("9")));
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["result"]["verdict"], "ConvergedTo");
    EXPECT_NEAR(j["result"]["limit"]["x"].get<double>(), 1.8, 1e-8);
    EXPECT_NEAR(j["result"]["limit"]["y"].get<double>(), 3.0 / 7.0, 1e-8);
    EXPECT_EQ(j["fixed_point"]["kind"], "Upper");
    EXPECT_EQ(j["budget"]["max_iters"], 100000);
}

TEST(CliTrajectory, OriginConvergesImmediately) {
    const CliRun r = run(with({"trajectory", "--x0", "0", "--y0", "0"}, base("9")));
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["result"]["verdict"], "ConvergedTo");
    EXPECT_EQ(j["result"]["iterations_used"], 1);
}

TEST(CliTrajectory, ToOrigin) {
    const CliRun r = run(with({"trajectory", "--x0", "0.1", "--y0", "0.3"}, base("9")));
    const json j = json::parse(r.out);
    EXPECT_EQ(j["fixed_point"]["kind"], "Origin");
}

TEST(CliTrajectory, CsvFileAndVerdict) {
    const auto path = scratch("traj.csv");
    const CliRun r = run(with({"trajectory", "--x0", "4", "--y0", "0.3", "--stride", "5", "--out", path.string()}, base("9")));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(path);
    EXPECT_EQ(csv.rfind("# alpha=0.4", 0), 0u);
    EXPECT_NE(csv.find("\nn,x,y\n0,4,0.29999999999999999\n5,"), std::string::npos);
    EXPECT_EQ(json::parse(r.out)["csv"], path.string());
}

TEST(CliTrajectory, ThresholdBudget) {
    const CliRun r = run(with({"trajectory", "--x0", "3", "--y0", "0.1"}, base(kNuText)));
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["budget"]["max_iters"], 1000000);
    EXPECT_EQ(j["fixed_point"]["kind"], "Double");
}

TEST(CliTrajectory, NegativeOrMissingStartIsUsageError) {
    EXPECT_EQ(run(with({"trajectory", "--x0", "-1", "--y0", "0"}, base("9"))).code, 2);
    EXPECT_EQ(run(with({"trajectory", "--x0", "1"}, base("9"))).code, 2);
}

TEST(CliTrajectory, GeneralMapAcceptsD1) {
    const CliRun r = run(with({"trajectory", "--x0", "1", "--y0", "0.1", "--d1", "0.01"}, base("9")));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["params"]["d1"], 0.01);
}

// --------------------------------------------------------------------------- basin

TEST(CliBasin, WritesRasterAndSidecar) {
    const auto path = scratch("basin.csv");
    const CliRun r = run(with({"basin", "--grid", "20,10", "--out", path.string(), "--seed", "7"}, base("9")));
    ASSERT_EQ(r.code, 0) << r.err;
    const json side = json::parse(slurp(scratch("basin.json")));
    EXPECT_EQ(side["nx"], 20);
    EXPECT_EQ(side["ny"], 10);
    EXPECT_EQ(side["seed"], 7);
    EXPECT_EQ(side["attractors"].size(), 2u);
    std::istringstream csv(slurp(path));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 200);
}

TEST(CliBasin, SingleBasinBelowThreshold) {
    const auto path = scratch("basin8.csv");
    const CliRun r = run(with({"basin", "--grid", "10,10", "--out", path.string()}, base("8")));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["counts"]["0"], 100);
}

TEST(CliBasin, SingleCellAtFixedPoint) {
    const CliRun r = run(with({"basin", "--grid", "1,1", "--box", "1.8,1.8,0.42857142857142855,0.42857142857142855",
                            "--out", scratch("one.csv").string()},
                           base("9")));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["counts"]["1"], 1);
}

TEST(CliBasin, InvalidGrid) {
    EXPECT_EQ(run(with({"basin", "--grid", "0,10"}, base("9"))).code, 2);
    EXPECT_EQ(run(with({"basin", "--grid", "10"}, base("9"))).code, 2);
    EXPECT_EQ(run(with({"basin", "--grid", "a,b"}, base("9"))).code, 2);
    EXPECT_EQ(run(with({"basin", "--grid", "2.5,3"}, base("9"))).code, 2);
}

// --------------------------------------------------------------------------- certify

TEST(CliCertify, BelowThresholdCertified) {
    const CliRun r = run(with({"certify"}, base("8")));
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["certified"].get<bool>());
    EXPECT_NEAR(j["certificate"]["common_limit"]["x"].get<double>(), 0.0, 1e-6);
}

TEST(CliCertify, AboveThresholdNotCertified) {
    const CliRun r = run(with({"certify"}, base("9")));
    EXPECT_EQ(r.code, 1);
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["certified"].get<bool>());
    EXPECT_NEAR(j["certificate"]["upper_corner_limit"]["x"].get<double>(), 1.8, 1e-6);
}

TEST(CliCertify, DegenerateBoxAtFixedPoint) {
    const CliRun r = run(with({"certify", "--box", "1.8,1.8,0.42857142857142855,0.42857142857142855"}, base("9")));
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliCertify, NotInvariantAndInvalidBox) {
    const CliRun ni = run(with({"certify", "--box", "2,3,0,0.1"}, base("9")));
    EXPECT_EQ(ni.code, 1);
    EXPECT_EQ(json::parse(ni.out)["reason"], "NotInvariant");
    EXPECT_EQ(run(with({"certify", "--box", "3,2,0,0.1"}, base("9"))).code, 2);
    EXPECT_EQ(run(with({"certify", "--box", "0,100,0,0.1"}, base("9"))).code, 2);
    EXPECT_EQ(run(with({"certify", "--box", "0,1,0"}, base("9"))).code, 2);
}

// --------------------------------------------------------------------------- sweep

TEST(CliSweep, RegimeFlipsAcrossThreshold) {
    const CliRun r = run({"sweep", "--alpha", "0.4", "--gamma", "1", "--mu", "0.6", "--d0", "0.5", "--beta-range", "8,9",
                       "--steps", "11"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("# alpha=0.4", 0), 0u);
    std::getline(in, line);
    EXPECT_EQ(line, "beta,nu,discriminant,regime,origin_type,x_lower,y_lower,type_lower,x_upper,y_upper,type_upper");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_NE(rows[3].find("BelowThreshold"), std::string::npos);  // beta = 8.3
    EXPECT_NE(rows[4].find("AboveThreshold"), std::string::npos);  // beta = 8.4
    EXPECT_NE(rows[10].find("Saddle"), std::string::npos);
}

// Near the threshold the two positive roots split like sqrt(beta - nu).
TEST(CliSweep, RootsCloseNearThreshold) {
    const CliRun r = run({"sweep", "--alpha", "0.4", "--gamma", "1", "--mu", "0.6", "--d0", "0.5", "--beta-range",
                       "8.3971143170299739,8.3981143170299739", "--steps", "2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    const json& row = j["rows"][1];
    ASSERT_EQ(row["fixed_points"].size(), 3u);
    const double gap = row["fixed_points"][2]["point"]["x"].get<double>() - row["fixed_points"][1]["point"]["x"].get<double>();
    const double scale = std::sqrt(1e-3);
    EXPECT_LT(gap, 10 * scale);
    EXPECT_GT(gap, 0.1 * scale);
}

TEST(CliSweep, EmptyOrBadRange) {
    const std::vector<std::string> p{"--alpha", "0.4", "--gamma", "1", "--mu", "0.6", "--d0", "0.5"};
    EXPECT_EQ(run(with({"sweep", "--beta-range", "9,8", "--steps", "3"}, p)).code, 2);
    EXPECT_EQ(run(with({"sweep", "--beta-range", "8,9", "--steps", "0"}, p)).code, 2);
    EXPECT_EQ(run(with({"sweep", "--beta-range", "0,9", "--steps", "3"}, p)).code, 2);
    EXPECT_EQ(run(with({"sweep", "--steps", "3"}, p)).code, 2);
}

// --------------------------------------------------------------------------- verify

TEST(CliVerify, ReferenceSetsPass) {
    for (const std::string& beta : {std::string("9"), kNuText}) {
        const CliRun r = run(with({"verify", "--samples", "2000"}, base(beta)));
        EXPECT_EQ(r.code, 0) << r.err;
        const json j = json::parse(r.out);
        EXPECT_TRUE(j["all_passed"].get<bool>());
        EXPECT_EQ(j["seed"], allee::kDefaultSeed);
    }
}

TEST(CliVerify, ZeroSamplesWarns) {
    const CliRun r = run(with({"verify", "--samples", "0"}, base("9")));
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("vacuous"), std::string::npos);
}

// --------------------------------------------------------------------------- process boundary

TEST(CliBinary, ExitCodesThroughTheProcess) {
    const std::string bin = ALLEE_CLI_BINARY;
    const std::string params = " --alpha 0.4 --gamma 1 --mu 0.6 --d0 0.5";
    auto code = [](const std::string& cmd) {
        const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    EXPECT_EQ(code(bin + " fixed-points --beta 9" + params), 0);
    EXPECT_EQ(code(bin + " certify --beta 9" + params), 1);
    EXPECT_EQ(code(bin + " fixed-points --beta 9 --alpha 0.7 --gamma 1 --mu 0.6 --d0 0.5"), 2);
}
