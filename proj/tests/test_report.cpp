#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmc/report.hpp"

using namespace cmc;

TEST(Report, DumpIsDeterministicAndRoundTrips) {
    json j{{"b", 0.1}, {"a", json::array({1, 2, 3})}, {"c", json{{"x", 1e-300}, {"y", "s"}}}, {"d", 2.0}};
    const std::string s1 = dump_json(j), s2 = dump_json(json::parse(dump_json(j)));
    EXPECT_EQ(s1, s2);
    const json back = json::parse(s1);
    EXPECT_EQ(back.at("b").get<double>(), 0.1);
    EXPECT_EQ(back.at("c").at("x").get<double>(), 1e-300);
    EXPECT_TRUE(back.at("d").is_number_float());
}

TEST(Report, NonFiniteFloatsBecomeStrings) {
    const json back = json::parse(dump_json(json{{"v", std::numeric_limits<double>::infinity()}}));
    EXPECT_EQ(back.at("v").get<std::string>(), "inf");
}

TEST(Report, ChecksRecordSlack) {
    VerificationReport r{"t", {}};
    r.add_geq("ge", 3, 1);
    r.add_leq("le", 3, 1);
    r.add_flag("f", true);
    ASSERT_EQ(r.checks.size(), 3u);
    EXPECT_DOUBLE_EQ(r.checks[0].slack, 2);
    EXPECT_TRUE(r.checks[0].pass);
    EXPECT_DOUBLE_EQ(r.checks[1].slack, -2);
    EXPECT_FALSE(r.checks[1].pass);
    EXPECT_FALSE(r.pass());
}

TEST(Report, CsvHasHeaderAndOneRowPerRecord) {
    json rows = json::array({json{{"a", 1}, {"b", "x,y"}}, json{{"a", 2}, {"b", "z"}}});
    const std::string csv = to_csv(rows);
    std::istringstream in(csv);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    EXPECT_EQ(n, 3);
    EXPECT_NE(csv.find("\"x,y\""), std::string::npos);
}

TEST(Report, AtomicWriteLeavesNoTemporary) {
    const auto dir = std::filesystem::temp_directory_path() / "cmch_report_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "sub" / "out.json";
    atomic_write(path, "first");
    atomic_write(path, "second");
    std::ifstream in(path);
    std::string s((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(s, "second");
    auto tmp = path;
    tmp += ".tmp";
    EXPECT_FALSE(std::filesystem::exists(tmp));
    std::filesystem::remove_all(dir);
}
