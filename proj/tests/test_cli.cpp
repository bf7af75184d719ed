#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fibstat/cli_runner.hpp"

using namespace fibstat;

namespace {

struct Captured {
    int code = 0;
    std::string out;
    std::string err;
};

Captured run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    Captured c;
    c.code = cli::run(args, out, err);
    c.out = out.str();
    c.err = err.str();
    return c;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("fibstat_cli_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, TransformPrintsCsv) {
    const Captured c = run_cli({"transform", "--witness", "fib-squares", "--N", "6"});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(c.out, "index,value\n1,1\n2,0\n3,0\n4,0\n5,0\n6,0\n");
}

TEST(Cli, TransformOfOnes) {
    const Captured c = run_cli({"transform", "--witness", "constant:1", "--N", "3"});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(c.out.substr(0, 26), "index,value\n1,1\n2,-1.5\n3,-");
}

TEST(Cli, StatconvReport) {
    const Captured c = run_cli({"statconv", "--witness", "char-squares", "--N", "100000", "--eps", "0.5"});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto report = nlohmann::ordered_json::parse(c.out);
    EXPECT_EQ(report["experiment"], "statconv");
    EXPECT_EQ(report["config"]["N"], 100000);
    EXPECT_NE(c.out.find("stat-convergent(0)"), std::string::npos);
}

TEST(Cli, KorovkinWritesFiles) {
    const auto dir = scratch("korovkin");
    const Captured c = run_cli({"korovkin", "--K", "128", "--target", "sin2", "--out", dir.string()});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "korovkin" / "report.json"));
    bool has_csv = false;
    for (const auto& entry : std::filesystem::directory_iterator(dir / "korovkin")) {
        has_csv = has_csv || entry.path().extension() == ".csv";
    }
    EXPECT_TRUE(has_csv);
    std::filesystem::remove_all(dir);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    const auto dir = scratch("config");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# transform settings\nwitness = alt01\nN = 4\n";
    }
    const Captured from_file = run_cli({"transform", "--config", (dir / "run.cfg").string()});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(std::count(from_file.out.begin(), from_file.out.end(), '\n'), 5);
    const Captured overridden = run_cli({"transform", "--config", (dir / "run.cfg").string(), "--N", "2"});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    EXPECT_EQ(std::count(overridden.out.begin(), overridden.out.end(), '\n'), 3);
    std::filesystem::remove_all(dir);
}

TEST(Cli, ConfigErrorsExitOne) {
    EXPECT_EQ(run_cli({"statconv", "--eps", "0.1", "--eps", "0.5"}).code, 1);
    EXPECT_EQ(run_cli({"statconv", "--eps", "-1"}).code, 1);
    EXPECT_EQ(run_cli({"transform", "--witness", "nope", "--N", "5"}).code, 1);
    EXPECT_EQ(run_cli({"statconv", "--N", "10"}).code, 1);
    EXPECT_EQ(run_cli({"korovkin", "--K", "600"}).code, 1);
    EXPECT_EQ(run_cli({"transform", "--bogus", "1"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);
}

TEST(Cli, CanonicalConfigIgnoresOutput) {
    cli::ExperimentConfig a = cli::resolve_config("density", {{"N", "1000"}, {"out", "x"}});
    cli::ExperimentConfig b = cli::resolve_config("density", {{"N", "1000"}, {"out", "y"}});
    EXPECT_EQ(a.canonical().dump(), b.canonical().dump());
    EXPECT_EQ(cli::fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Cli, ExecuteIsDeterministic) {
    const cli::ExperimentConfig c = cli::resolve_config("rates", {{"N", "20000"}, {"K", "100"}});
    EXPECT_EQ(cli::execute(c).report, cli::execute(c).report);
}

TEST(Cli, BinaryExitCodes) {
    const std::string exe = FIBSTAT_CLI_PATH;
    EXPECT_EQ(std::system((exe + " fib-audit --N 50 > /dev/null").c_str()), 0);
    const int bad = std::system((exe + " density --set primes > /dev/null 2>&1").c_str());
    ASSERT_NE(bad, -1);
    EXPECT_EQ(WEXITSTATUS(bad), 1);
}
