#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmc/report.hpp"

namespace cmc {

/// One component of a level: the set of singular points it meets (bitmask) and its disk count.
struct IncidenceComponent {
    unsigned mask = 0;
    int disks = 1;
    bool flat = false;
    bool orientable = true;
    int index = 1;
};

struct IncidenceStructure {
    int points = 1;
    std::vector<IncidenceComponent> components;
};

struct IncidenceResult {
    int lhs = 0;        // sum over components with >1 disk of (2n - 3)
    int rhs = 0;        // |S| - 1
    bool pass = true;
    bool equality = false;
    bool chain = false;            // all multi-disk components have 2 disks at 2 points, |S|-1 of them
    std::optional<int> lhs_annotated;  // adds 3 I(W) and the flat count
    std::optional<int> rhs_annotated;  // 2(|S| - 1)
    std::optional<bool> pass_annotated;
};

inline int popcount(unsigned m) { return __builtin_popcount(m); }

inline bool incidence_connected(const IncidenceStructure& s) {
    if (s.points <= 0) return false;
    const unsigned full = (1u << s.points) - 1u;
    unsigned reached = 1u;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& c : s.components)
            if ((c.mask & reached) && (c.mask & ~reached)) {
                reached |= c.mask;
                grew = true;
            }
    }
    return reached == full;
}

inline void require_well_formed(const IncidenceStructure& s) {
    if (s.points < 1 || s.points > 30) throw std::invalid_argument("incidence: points must lie in [1, 30]");
    const unsigned full = (1u << s.points) - 1u;
    unsigned cover = 0;
    for (const auto& c : s.components) {
        if (c.mask == 0 || (c.mask & ~full)) throw std::invalid_argument("incidence: component meets no valid point");
        if (c.disks < popcount(c.mask)) throw std::invalid_argument("incidence: disks fewer than points met");
        cover |= c.mask;
    }
    if (cover != full || !incidence_connected(s)) throw std::invalid_argument("incidence: structure is not connected");
}

inline IncidenceResult incidence_lower_bound(const IncidenceStructure& s, bool annotated = false) {
    require_well_formed(s);
    IncidenceResult r;
    r.rhs = s.points - 1;
    int multi = 0;
    bool all_pairs = true;
    int ann = 0;
    for (const auto& c : s.components) {
        if (c.disks <= 1) continue;
        ++multi;
        r.lhs += 2 * c.disks - 3;
        if (!(c.disks == 2 && popcount(c.mask) == 2)) all_pairs = false;
        ann += 2 * c.disks - 3 + (c.flat ? 1 : 3 * c.index);
    }
    r.pass = r.lhs >= r.rhs;
    r.equality = r.lhs == r.rhs;
    r.chain = all_pairs && multi == s.points - 1;
    if (annotated) {
        r.lhs_annotated = ann;
        r.rhs_annotated = 2 * (s.points - 1);
        r.pass_annotated = ann >= *r.rhs_annotated;
    }
    return r;
}

inline json to_json(const IncidenceResult& r) {
    json j{{"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}, {"equality", r.equality}, {"chain", r.chain}};
    if (r.lhs_annotated) {
        j["lhs_annotated"] = *r.lhs_annotated;
        j["rhs_annotated"] = *r.rhs_annotated;
        j["pass_annotated"] = *r.pass_annotated;
    }
    return j;
}

struct IncidenceCensus {
    long structures = 0;
    long violations = 0;
    long equality_cases = 0;
    long equality_mismatches = 0;      // equality differs from the chain characterization
    long annotated_checked = 0;        // flat/non-flat assignments of multi-disk components
    long annotated_violations = 0;
    std::vector<long> by_points;       // structures per number of points
    std::optional<IncidenceStructure> counterexample;
};

inline json to_json(const IncidenceCensus& c) {
    return json{{"structures", c.structures}, {"violations", c.violations}, {"equality_cases", c.equality_cases},
                {"equality_mismatches", c.equality_mismatches}, {"annotated_checked", c.annotated_checked},
                {"annotated_violations", c.annotated_violations}, {"by_points", c.by_points}};
}

/// All connected incidence structures with labelled points, components taken as a multiset
/// of (point set, disk count). Each is checked against the lower bound and its equality case;
/// the annotated form is checked for every flat/non-flat choice (non-flat at index 1).
inline IncidenceCensus enumerate_incidence_structures(int max_points, int max_components, int max_disks) {
    if (max_points < 1 || max_components < 1 || max_disks < 1)
        throw std::invalid_argument("enumerate_incidence_structures: caps must be positive");
    if (max_points > 5 || max_components > 5 || max_disks > 8)
        throw std::invalid_argument("enumerate_incidence_structures: caps exceed (5,5,8)");
    IncidenceCensus census;
    census.by_points.assign(static_cast<size_t>(max_points + 1), 0);

    for (int P = 1; P <= max_points; ++P) {
        const unsigned full = (1u << P) - 1u;
        std::vector<IncidenceComponent> types;
        for (unsigned m = 1; m <= full; ++m)
            for (int n = popcount(m); n <= max_disks; ++n) types.push_back({m, n});

        IncidenceStructure cur;
        cur.points = P;
        auto visit = [&]() {
            if (!incidence_connected(cur)) return;
            ++census.structures;
            ++census.by_points[static_cast<size_t>(P)];
            const auto r = incidence_lower_bound(cur);
            if (!r.pass) {
                ++census.violations;
                if (!census.counterexample) census.counterexample = cur;
            }
            if (r.equality) ++census.equality_cases;
            if (r.equality != r.chain) ++census.equality_mismatches;
            std::vector<size_t> multi;
            for (size_t i = 0; i < cur.components.size(); ++i)
                if (cur.components[i].disks > 1) multi.push_back(i);
            IncidenceStructure ann = cur;
            for (unsigned f = 0; f < (1u << multi.size()); ++f) {
                for (size_t k = 0; k < multi.size(); ++k) {
                    auto& c = ann.components[multi[k]];
                    c.flat = (f >> k) & 1u;
                    c.index = c.flat ? 0 : 1;
                }
                const auto ra = incidence_lower_bound(ann, true);
                ++census.annotated_checked;
                if (!*ra.pass_annotated) ++census.annotated_violations;
            }
        };
        auto rec = [&](auto&& self, size_t start, int disks_left, unsigned cover) -> void {
            if (cover == full) visit();
            if (static_cast<int>(cur.components.size()) == max_components) return;
            for (size_t t = start; t < types.size(); ++t) {
                if (types[t].disks > disks_left) continue;
                cur.components.push_back(types[t]);
                self(self, t, disks_left - types[t].disks, cover | types[t].mask);
                cur.components.pop_back();
            }
        };
        rec(rec, 0, max_disks, 0u);
    }
    return census;
}

} // namespace cmc
