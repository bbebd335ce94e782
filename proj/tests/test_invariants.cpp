#include <gtest/gtest.h>

#include <numbers>

#include "cmc/invariants.hpp"

using namespace cmc;
constexpr double pi = std::numbers::pi;

TEST(Invariants, EqualityCasesOfTheIndexBound) {
    EXPECT_EQ(cm_index_lower_bound(catenoid_profile()).bound, 1);
    EXPECT_EQ(cm_index_lower_bound(enneper_profile()).bound, 1);
    EXPECT_EQ(cm_index_lower_bound(plane_profile()).bound, 0);
    // 3I >= rhs holds with equality for the two index-one examples
    EXPECT_EQ(cm_index_lower_bound(catenoid_profile()).unified_rhs, 3);
    EXPECT_EQ(cm_index_lower_bound(enneper_profile()).unified_rhs, 3);
}

TEST(Invariants, HandComputedBound) {
    // genus 1, three embedded ends: chi = -3, S = 3, e = 3 -> rhs = 3 + 6 + 3 - 3 = 9
    const auto b = cm_index_lower_bound(make_profile(true, 1, {1, 1, 1}));
    EXPECT_EQ(b.unified_rhs, 9);
    EXPECT_EQ(b.bound, 3);
}

TEST(Invariants, CensusIsConsistent) {
    const auto c = profile_census(3, 4, 4, 3);
    EXPECT_GT(c.profiles, 0);
    EXPECT_EQ(c.inconsistencies(), 0);
    EXPECT_EQ(c.identity_mismatch, 0);
}

TEST(Invariants, JorgeMeeksExactTotals) {
    EXPECT_NEAR(jorge_meeks_residual(catenoid_profile(), -4 * pi), 0, 1e-15);
    EXPECT_NEAR(jorge_meeks_residual(enneper_profile(), -4 * pi), 0, 1e-15);
    EXPECT_NEAR(jorge_meeks_residual(plane_profile(), 0), 0, 1e-15);
    // Costa: genus 1, three embedded ends, total -12 pi
    EXPECT_NEAR(jorge_meeks_residual(make_profile(true, 1, {1, 1, 1}), -12 * pi), 0, 1e-15);
    EXPECT_NEAR(jorge_meeks_residual_annular(-1, -2 * pi), 0, 1e-15);
}

TEST(Invariants, Parity) {
    EXPECT_TRUE(parity_check(catenoid_profile(), -4 * pi).pass);
    EXPECT_TRUE(parity_check(enneper_profile(), -4 * pi * 1.001).pass);
    EXPECT_TRUE(parity_check(enneper_profile(), -3 * pi).degree_flagged);
    EXPECT_FALSE(parity_check(make_profile(true, 0, {2})).spin_parity);
}

TEST(Invariants, ProfileIssues) {
    EXPECT_TRUE(profile_issues(catenoid_profile()).empty());
    EXPECT_FALSE(profile_issues(make_profile(true, -1, {1})).empty());
    EXPECT_FALSE(profile_issues(make_profile(true, 0, {})).empty());
    EXPECT_FALSE(profile_issues(make_profile(true, 0, {0})).empty());
    EXPECT_THROW(cm_index_lower_bound(make_profile(true, 0, {})), std::invalid_argument);
}

TEST(Invariants, CeilDiv) {
    for (int a = -20; a <= 20; ++a)
        for (int b = 1; b <= 5; ++b)
            EXPECT_EQ(ceil_div(a, b), static_cast<int>(std::ceil(static_cast<double>(a) / b))) << a << "/" << b;
}

TEST(Invariants, EvenIndexStrengthening) {
    const int I = cm_index_lower_bound_even(catenoid_profile());
    EXPECT_EQ(I % 2, 0);
    EXPECT_GE(3 * I, cm_index_lower_bound(catenoid_profile()).unified_rhs + 1);
}

TEST(Invariants, StabilityRules) {
    EXPECT_FALSE(stability_rules_check(catenoid_profile(), true).violations.empty());
    EXPECT_TRUE(stability_rules_check(plane_profile(), true, true).violations.empty());
    EXPECT_EQ(stability_rules_check(make_profile(false, 0, {3}), false).implied_min_index, 2);
}

TEST(Invariants, SmallHelpers) {
    EXPECT_TRUE(spinning_ends_floor(catenoid_profile()));
    EXPECT_FALSE(spinning_ends_floor(plane_profile()));
    EXPECT_TRUE(genus_subsurface_check(1, 0, 1, 1, 1));
    EXPECT_EQ(genus_drop_bound(3, 2), 5);
    EXPECT_THROW(genus_drop_bound(1, 2), std::invalid_argument);
}
