#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "cmc/incidence.hpp"

using namespace cmc;

namespace {

IncidenceStructure make(int P, std::vector<std::pair<unsigned, int>> comps) {
    IncidenceStructure s;
    s.points = P;
    for (auto [m, d] : comps) s.components.push_back({m, d});
    return s;
}

// union-find connectivity over points, independent of the library routine
bool connected(const IncidenceStructure& s) {
    std::vector<int> p(static_cast<size_t>(s.points));
    std::iota(p.begin(), p.end(), 0);
    auto find = [&](int x) {
        while (p[static_cast<size_t>(x)] != x) x = p[static_cast<size_t>(x)];
        return x;
    };
    for (const auto& c : s.components) {
        int first = -1;
        for (int i = 0; i < s.points; ++i)
            if (c.mask >> i & 1u) {
                if (first < 0) first = i;
                else p[static_cast<size_t>(find(i))] = find(first);
            }
    }
    for (int i = 1; i < s.points; ++i)
        if (find(i) != find(0)) return false;
    return true;
}

} // namespace

TEST(Incidence, HandCases) {
    auto r = incidence_lower_bound(make(2, {{3u, 2}}));
    EXPECT_EQ(r.lhs, 1);
    EXPECT_EQ(r.rhs, 1);
    EXPECT_TRUE(r.equality);
    EXPECT_TRUE(r.chain);

    r = incidence_lower_bound(make(3, {{7u, 3}}));
    EXPECT_EQ(r.lhs, 3);
    EXPECT_FALSE(r.equality);

    r = incidence_lower_bound(make(3, {{3u, 2}, {6u, 2}}));
    EXPECT_TRUE(r.equality);
    EXPECT_TRUE(r.chain);

    r = incidence_lower_bound(make(1, {{1u, 1}, {1u, 1}}));
    EXPECT_EQ(r.lhs, 0);
    EXPECT_TRUE(r.equality);
}

TEST(Incidence, MalformedStructuresThrow) {
    EXPECT_THROW(incidence_lower_bound(make(2, {{1u, 1}})), std::invalid_argument);
    EXPECT_THROW(incidence_lower_bound(make(2, {{1u, 1}, {2u, 1}})), std::invalid_argument);
    EXPECT_THROW(incidence_lower_bound(make(2, {{3u, 1}})), std::invalid_argument);
}

TEST(Incidence, RandomStructuresAgainstSpanningOracle) {
    // A connected hypergraph on P points has sum(|mask| - 1) >= P - 1; a component with
    // n >= 2 disks meets at most n points, so 2n - 3 >= |mask| - 1.
    std::mt19937 rng(12345);
    int checked = 0;
    for (int trial = 0; trial < 20000; ++trial) {
        const int P = 1 + static_cast<int>(rng() % 6);
        const int k = 1 + static_cast<int>(rng() % 6);
        IncidenceStructure s;
        s.points = P;
        for (int i = 0; i < k; ++i) {
            const unsigned m = 1u + static_cast<unsigned>(rng() % ((1u << P) - 1u));
            s.components.push_back({m, __builtin_popcount(m) + static_cast<int>(rng() % 3)});
        }
        unsigned cover = 0;
        for (const auto& c : s.components) cover |= c.mask;
        if (cover != (1u << P) - 1u || !connected(s)) continue;
        int span = 0, lhs = 0;
        for (const auto& c : s.components) {
            span += __builtin_popcount(c.mask) - 1;
            if (c.disks > 1) lhs += 2 * c.disks - 3;
        }
        ASSERT_GE(span, P - 1);
        const auto r = incidence_lower_bound(s);
        EXPECT_EQ(r.lhs, lhs);
        EXPECT_EQ(r.rhs, P - 1);
        EXPECT_TRUE(r.pass);
        ++checked;
    }
    EXPECT_GT(checked, 1000);
}

TEST(Incidence, SinglePointCountMatchesPartitions) {
    // one point: multisets of disk counts, at most 5 parts, total at most 8
    std::vector<std::vector<long>> p(9, std::vector<long>(6, 0));  // p[n][k]: partitions of n into at most k parts
    for (int k = 0; k <= 5; ++k) p[0][static_cast<size_t>(k)] = 1;
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= 5; ++k)
            p[static_cast<size_t>(n)][static_cast<size_t>(k)] =
                p[static_cast<size_t>(n)][static_cast<size_t>(k - 1)] + (n >= k ? p[static_cast<size_t>(n - k)][static_cast<size_t>(k)] : 0);
    long expected = 0;
    for (int n = 1; n <= 8; ++n) expected += p[static_cast<size_t>(n)][5];
    const auto c = enumerate_incidence_structures(1, 5, 8);
    EXPECT_EQ(c.by_points[1], expected);
    EXPECT_EQ(expected, 59);
}

TEST(Incidence, FullCensusHasNoViolations) {
    const auto c = enumerate_incidence_structures(5, 5, 8);
    EXPECT_GT(c.structures, 0);
    EXPECT_EQ(c.violations, 0);
    EXPECT_EQ(c.equality_mismatches, 0);
    EXPECT_EQ(c.annotated_violations, 0);
    EXPECT_FALSE(c.counterexample.has_value());
}

TEST(Incidence, CapsAreEnforced) {
    EXPECT_THROW(enumerate_incidence_structures(6, 5, 8), std::invalid_argument);
    EXPECT_THROW(enumerate_incidence_structures(0, 5, 8), std::invalid_argument);
}
