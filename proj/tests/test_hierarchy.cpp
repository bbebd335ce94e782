#include <gtest/gtest.h>

#include <set>

#include "cmc/hierarchy.hpp"
#include "cmc/hierarchy_random.hpp"

using namespace cmc;

namespace {

bool check_passes(const VerificationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c.pass;
    ADD_FAILURE() << "no check named " << name;
    return false;
}

// Two index-one pieces (one end of multiplicity three each) joined by one non-flat annular
// limit component meeting both singular points.
Hierarchy two_point_hierarchy() {
    Hierarchy h;
    h.root = DeltaNode{3, 2, 6, 0, 0, true, nullptr};
    auto lv = std::make_shared<LevelRecord>();
    lv->singular_points = {minimal_node(true, 0, 1, 3, 1), minimal_node(true, 0, 1, 3, 1)};
    LimitComponent w;
    w.flat = false;
    w.index = 1;
    w.own_ends = 2;
    w.points = {0, 1};
    w.boundary_disks = 2;
    lv->components = {w};
    lv->level_ends = 2;
    lv->level_spinning = 6;
    lv->branching = 4;
    h.root.level = lv;
    return h;
}

} // namespace

TEST(Hierarchy, TrivialCorrectionIsThreeIMinusThree) {
    for (int I = 1; I <= 12; ++I) {
        const Hierarchy h = trivial_hierarchy(minimal_node(true, 0, 2, 2, I));
        EXPECT_EQ(correction_term(h, Variant::general), 3 * I - 3);
        EXPECT_EQ(correction_term(h, Variant::orientable), 3 * I - 3);
        if (I >= 2) {
            const Hierarchy n = trivial_hierarchy(minimal_node(false, 0, 1, 3, I));
            EXPECT_EQ(correction_term(n, Variant::nonorientable), 3 * I - 3);
        }
    }
}

TEST(Hierarchy, CatenoidAndEnneperAreEqualityCases) {
    for (const auto& n : {minimal_node(true, 0, 2, 2, 1), minimal_node(true, 0, 1, 3, 1)}) {
        const auto rep = main_inequality(trivial_hierarchy(n));
        EXPECT_TRUE(rep.pass());
        for (const auto& c : rep.checks)
            if (c.name == "6I >= -chi+2S+e+C") EXPECT_EQ(c.slack, 0);
    }
}

TEST(Hierarchy, VariantMustMatchOrientation) {
    EXPECT_THROW(correction_term(trivial_hierarchy(minimal_node(false, 0, 1, 3, 2)), Variant::orientable), std::invalid_argument);
    EXPECT_THROW(correction_term(trivial_hierarchy(minimal_node(true, 0, 2, 2, 1)), Variant::nonorientable), std::invalid_argument);
}

TEST(Hierarchy, IndexOneClassification) {
    std::set<std::pair<int, int>> admitted;
    for (bool o : {true, false})
        for (int g = 0; g <= 3; ++g)
            for (int e = 1; e <= 6; ++e)
                for (int S = 1; S <= 10; ++S) {
                    const DeltaNode n = minimal_node(o, g, e, S, 1);
                    const Hierarchy h = trivial_hierarchy(n);
                    if (!validate(h).empty() || !main_inequality(h).pass()) continue;
                    admitted.insert({e, S});
                    EXPECT_TRUE(delta_complexity_bounds(n).pass()) << e << "," << S;
                }
    EXPECT_EQ(admitted, (std::set<std::pair<int, int>>{{1, 3}, {2, 2}}));
}

TEST(Hierarchy, ValidationRules) {
    EXPECT_TRUE(validate(trivial_hierarchy(minimal_node(true, 0, 2, 2, 1))).empty());
    EXPECT_FALSE(validate(trivial_hierarchy(minimal_node(false, 0, 1, 2, 2))).empty());  // S >= 3
    EXPECT_FALSE(validate(trivial_hierarchy(minimal_node(false, 0, 1, 3, 1))).empty());  // I >= 2
    DeltaNode bad = minimal_node(true, 0, 2, 2, 1);
    bad.euler_char = 1;
    EXPECT_FALSE(validate(trivial_hierarchy(bad)).empty());
    EXPECT_TRUE(validate(two_point_hierarchy()).empty());

    Hierarchy h = two_point_hierarchy();
    h.root.level->components[0].points = {0};
    EXPECT_FALSE(validate(h).empty());  // q1 meets nothing
}

TEST(Hierarchy, CycleIsDetected) {
    Hierarchy h = two_point_hierarchy();
    h.root.level->singular_points.push_back(h.root);
    EXPECT_THROW(validate(h), HierarchyError);
    h.root.level->singular_points.pop_back();
}

TEST(Hierarchy, StatsOfTwoPointExample) {
    const auto s = stats(two_point_hierarchy());
    EXPECT_EQ(s.L, 1);
    EXPECT_EQ(s.S_hat, 2);
    EXPECT_EQ(s.O, 0);
    EXPECT_EQ(s.excess, 0);
    EXPECT_EQ(s.census.nt_nf_or_dgt1, 1);
    EXPECT_EQ(correction_term(s, Variant::general), 4);
    EXPECT_EQ(correction_term(s, Variant::orientable), 5);
}

// Counterexample found by the fuzzer (seed 1840): valid, the general display is sharp,
// and the orientable corrected display exceeds 6I by one.
TEST(Hierarchy, OrientableVariantCounterexample) {
    const Hierarchy h = two_point_hierarchy();
    ASSERT_TRUE(validate(h).empty());
    const auto rep = main_inequality(h);
    EXPECT_TRUE(check_passes(rep, "6I >= -chi+2S+e+C"));
    EXPECT_FALSE(check_passes(rep, "6I >= -chi+2S+e+C_or"));
    EXPECT_TRUE(per_level_bounds(h).pass());
    EXPECT_EQ(to_json(random_hierarchy(1840)), to_json(h));
}

TEST(Hierarchy, JsonRoundTrip) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Hierarchy h = random_hierarchy(seed);
        const json j = to_json(h);
        const Hierarchy back = hierarchy_from_json(json::parse(j.dump()));
        EXPECT_EQ(to_json(back), j);
        EXPECT_EQ(correction_term(stats(back), Variant::general), correction_term(stats(h), Variant::general));
    }
}

TEST(Hierarchy, JsonRejectsInconsistentPoints) {
    json j = to_json(two_point_hierarchy());
    j["root"]["level"]["components"][0]["attached_singular"] = 1;
    EXPECT_THROW(hierarchy_from_json(j), std::invalid_argument);
}

TEST(Hierarchy, RandomIsDeterministic) {
    for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) EXPECT_EQ(to_json(random_hierarchy(seed)), to_json(random_hierarchy(seed)));
    EXPECT_THROW(random_hierarchy(0, HierarchyCaps{0, 3, 6}), std::invalid_argument);
}

namespace {

void fuzz_general(const HierarchyCaps& caps, int count) {
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = static_cast<std::uint64_t>(i);
        const Hierarchy h = random_hierarchy(seed, caps);
        const auto v = validate(h);
        ASSERT_TRUE(v.empty()) << "seed " << seed << ": " << to_string(v.front());
        const auto s = stats(h);
        ASSERT_EQ(s.S_hat + 1, s.minimal_count + s.nonminimal_count);
        for (const auto& c : main_inequality(h).checks)
            if (c.name != "6I >= -chi+2S+e+C_or") ASSERT_TRUE(c.pass) << "seed " << seed << ": " << c.name;
        const auto pl = per_level_bounds(h);
        ASSERT_TRUE(pl.pass()) << "seed " << seed;
    }
}

} // namespace

TEST(HierarchyFuzz, GeneralAndNonOrientableDisplaysDefaultCaps) { fuzz_general({}, 10000); }
TEST(HierarchyFuzz, ShallowWideCaps) { fuzz_general({1, 5, 3}, 3000); }
TEST(HierarchyFuzz, DeepNarrowCaps) { fuzz_general({5, 2, 8}, 3000); }

TEST(HierarchyFuzz, GeneratorCoversBothOrientations) {
    int orientable = 0, nonorientable = 0, leveled = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const Hierarchy h = random_hierarchy(seed);
        (h.root.orientable ? orientable : nonorientable)++;
        if (!h.root.minimal()) ++leveled;
    }
    EXPECT_GT(orientable, 100);
    EXPECT_GT(nonorientable, 100);
    EXPECT_GT(leveled, 1000);
}

// The orientable corrected display on the same seeds. Fails on a handful of hierarchies;
// see OrientableVariantCounterexample.
TEST(HierarchyFuzz, OrientableCorrectedDisplay) {
    int failures = 0;
    std::uint64_t first = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const Hierarchy h = random_hierarchy(seed);
        if (!h.root.orientable) continue;
        if (!check_passes(main_inequality(h), "6I >= -chi+2S+e+C_or") && failures++ == 0) first = seed;
    }
    EXPECT_EQ(failures, 0) << "first failing seed " << first;
}
