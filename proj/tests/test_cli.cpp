#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("cmch_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run cmch(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = std::string(CMCH_BIN) + " " + args + " > " + out.string() + " 2> " + (scratch() / "stderr.txt").string();
    const int st = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    std::ifstream in(out);
    r.out.assign(std::istreambuf_iterator<char>(in), {});
    return r;
}

json read(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

} // namespace

TEST(Cli, BoundsEvalChordArc) {
    const auto r = cmch("bounds eval chord_arc --args I=1,B=0");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("tool"), "cmch");
    EXPECT_TRUE(j.at("pass").get<bool>());
    EXPECT_NEAR(j.at("result").at("value").get<double>(), 4 * std::sqrt(3.0) + 5.5 * std::numbers::pi, 1e-12);
    EXPECT_EQ(j.at("config").at("args").at("I"), 1.0);
}

TEST(Cli, ReportFileAndSidecar) {
    const fs::path p = scratch() / "bound.json";
    ASSERT_EQ(cmch("bounds eval chord_arc --args I=2,B=1 -o " + p.string()).code, 0);
    const auto j = read(p);
    EXPECT_EQ(j.at("config").at("name"), "chord_arc");
    const auto meta = read(p.string() + ".meta.json");
    EXPECT_TRUE(meta.contains("timestamp"));
    EXPECT_TRUE(meta.contains("seconds"));
    EXPECT_FALSE(j.contains("timestamp"));
}

TEST(Cli, OutputIsDeterministic) {
    const auto a = cmch("hierarchy fuzz --seed 7 --count 50");
    const auto b = cmch("hierarchy fuzz --seed 7 --count 50");
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CsvFormat) {
    const auto r = cmch("bounds eval chord_arc --args I=1,B=0 --format csv");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("result.value"), std::string::npos);
    EXPECT_EQ(cmch("bounds eval chord_arc --args I=1,B=0 --format xml").code, 2);
}

TEST(Cli, ConfigFileMergesUnderFlags) {
    const fs::path cfg = scratch() / "cfg.txt";
    std::ofstream(cfg) << "# bounds\nargs = I=3,B=0\n";
    const auto a = json::parse(cmch("--config " + cfg.string() + " bounds eval chord_arc").out);
    EXPECT_EQ(a.at("config").at("args").at("I"), 3.0);
    const auto b = json::parse(cmch("--config " + cfg.string() + " bounds eval chord_arc --args I=1,B=0").out);
    EXPECT_EQ(b.at("config").at("args").at("I"), 1.0);
}

TEST(Cli, ConfigurationErrorsExitTwo) {
    EXPECT_EQ(cmch("hierarchy check " + (scratch() / "missing.json").string()).code, 2);
    EXPECT_EQ(cmch("frobnicate").code, 2);
    EXPECT_EQ(cmch("bounds eval no_such_bound").code, 2);
    EXPECT_EQ(cmch("bounds eval chord_arc --args I=one").code, 2);
    EXPECT_EQ(cmch("bounds eval chord_arc --args I").code, 2);
    EXPECT_EQ(cmch("--config " + (scratch() / "nope.txt").string() + " bounds eval chord_arc").code, 2);
    EXPECT_EQ(cmch("invariants").code, 2);
    const fs::path bad = scratch() / "bad.json";
    std::ofstream(bad) << "{ not json";
    EXPECT_EQ(cmch("hierarchy check " + bad.string()).code, 2);
}

TEST(Cli, FailedCheckExitsOne) {
    // a seed whose hierarchy breaks the orientable corrected display
    const auto r = cmch("hierarchy fuzz --seed 1840 --count 1");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(json::parse(r.out).at("result").at("failures").at("6I >= -chi+2S+e+C_or").at("first_seed"), 1840);
}

TEST(Cli, CatenoidPipeline) {
    const fs::path mesh = scratch() / "catenoid.json";
    ASSERT_EQ(cmch("surface gen catenoid --shape annulus --bounds 0.1,10 --res 16,24 -o " + mesh.string()).code, 0);
    const auto r = cmch("index " + mesh.string());
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("result").at("index"), 1);
    EXPECT_EQ(j.at("result").at("inertia_index"), 1);
}

TEST(Cli, InvariantsForCatenoidProfile) {
    const auto r = cmch("invariants --genus 0 --ends 1,1 --total-curvature " + std::to_string(-4 * std::numbers::pi));
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out).at("result");
    EXPECT_EQ(j.at("cm_bound").at("bound"), 1);
    EXPECT_NEAR(j.at("jorge_meeks_residual").get<double>(), 0.0, 1e-5);
}
