#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cmc/hierarchy.hpp"
#include "cmc/invariants.hpp"

namespace cmc {

struct HierarchyCaps {
    int max_depth = 3;     // nested levels along any path
    int max_children = 3;  // singular points per level
    int max_index = 6;     // cap on the index drawn for minimal elements
};

namespace detail {

// mt19937_64 output mapped by modulo: identical streams on every platform,
// which the standard distributions do not promise.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    int in(int lo, int hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(int num, int den) { return in(0, den - 1) < num; }

private:
    std::mt19937_64 rng_;
};

struct GenPiece {
    DeltaNode node;
    std::vector<int> mults;  // multiplicities of the boundary curves of the piece
};

inline std::vector<int> split_spinning(Draw& d, int S, int e) {
    std::vector<int> m(static_cast<size_t>(e), 1);
    for (int k = e; k < S; ++k) ++m[static_cast<size_t>(d.in(0, e - 1))];
    return m;
}

class HierarchyGenerator {
public:
    HierarchyGenerator(std::uint64_t seed, HierarchyCaps caps) : d_(seed), caps_(caps) {
        allow_nonorientable_ = d_.chance(2, 5);
    }

    Hierarchy run() {
        Hierarchy h;
        const bool leveled = caps_.max_depth >= 1 && d_.chance(4, 5);
        h.root = (leveled ? nonminimal(0) : minimal()).node;
        return h;
    }

private:
    Draw d_;
    HierarchyCaps caps_;
    bool allow_nonorientable_ = false;
    static constexpr int kAttempts = 500;

    bool pick_orientable() { return !allow_nonorientable_ || d_.chance(7, 10); }

    GenPiece minimal() {
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            const bool orientable = pick_orientable();
            const int g = d_.chance(3, 4) ? 0 : 1;
            const int e = d_.in(1, 3);
            std::vector<int> ends;
            for (int j = 0; j < e; ++j) ends.push_back(d_.in(1, 3));
            TopologyProfile p = make_profile(orientable, g, ends);
            const int S = p.S();
            if (mod2(S) != mod2(e) || e + S < 4) continue;
            if (!orientable && S < 3) continue;
            int floor = std::max(1, cm_index_lower_bound(p).bound);
            if (!orientable) floor = std::max(floor, 2);
            if (floor > caps_.max_index) continue;
            const int I = std::min(caps_.max_index, floor + (d_.chance(1, 3) ? 1 : 0));
            return {minimal_node(orientable, g, e, S, I), ends};
        }
        throw HierarchyError("random_hierarchy: no minimal element within caps");
    }

    // Ends and index of one component given the child curves it bounds.
    bool fill_component(LimitComponent& w, std::vector<int>& end_mults,
                        const std::vector<std::pair<int, int>>& curves, bool orientable) {
        int B = 0;
        std::map<int, int> per_point;
        std::map<int, int> branched_points;
        int max_m = 0;
        for (const auto& [q, m] : curves) {
            B += m - 1;
            per_point[q] += m;
            max_m = std::max(max_m, m);
            if (m > 1) branched_points[q] = 1;
        }
        w.boundary_disks = static_cast<int>(curves.size());
        w.points.clear();
        for (const auto& [q, n] : per_point) w.points.push_back(q);
        w.orientable = orientable;

        if (orientable && d_.chance(1, 4)) {
            // flat: a branched cover of a plane, degree = S, planar
            int worst = 0;
            for (const auto& [q, n] : per_point) worst = std::max(worst, n);
            const int emax = (2 + B) / 2;
            for (int e = d_.in(1, std::max(1, emax)); e >= 1; --e) {
                const int S = 2 + B - e;
                if (S < e || S < worst) continue;
                w.flat = true;
                w.genus = 0;
                w.own_ends = e;
                w.index = 0;
                end_mults = split_spinning(d_, S, e);
                return true;
            }
        }
        w.flat = false;
        const int g = d_.chance(4, 5) ? 0 : 1;
        const int e = orientable ? d_.in(1, 3) : d_.in(1, 2);
        const int chi = orientable ? 2 - 2 * g - e : 1 - g - e;
        int S = std::max({e, B + chi + (orientable ? 2 : 1), 4 - e});
        if (mod2(S) != mod2(B + e)) ++S;
        if (d_.chance(1, 4)) S += 2;
        w.genus = g;
        w.own_ends = e;
        end_mults = split_spinning(d_, S, e);

        std::vector<int> branch;
        for (const auto& [q, m] : curves)
            if (m > 1) branch.push_back(m - 1);
        TopologyProfile p = make_profile(orientable, g, end_mults, branch);
        p.branch_image_points = static_cast<int>(branched_points.size());
        if (!parity_check(p).spin_parity) return false;
        int floor = std::max(0, cm_index_lower_bound(p).bound);
        floor = std::max(floor, stability_rules_check(p, false).implied_min_index);
        if (!orientable && w.attached_singular() == 1 && w.boundary_disks > 1) floor = std::max(floor, 2);
        w.index = floor + (d_.chance(1, 3) ? 1 : 0);
        return true;
    }

    GenPiece nonminimal(int depth) {
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            auto lv = std::make_shared<LevelRecord>();
            std::vector<std::vector<int>> child_mults;
            const int k = d_.in(1, caps_.max_children);
            for (int q = 0; q < k; ++q) {
                const bool deeper = depth + 1 < caps_.max_depth && d_.chance(1, 3);
                GenPiece c = deeper ? nonminimal(depth + 1) : minimal();
                lv->singular_points.push_back(c.node);
                child_mults.push_back(c.mults);
            }
            // child boundary curves as (point, multiplicity)
            std::vector<std::pair<int, int>> curves;
            for (int q = 0; q < k; ++q)
                for (int m : child_mults[static_cast<size_t>(q)]) curves.emplace_back(q, m);

            auto groups = assign_curves(curves, k);
            bool orientable_level = true;
            for (const auto& c : lv->singular_points) orientable_level = orientable_level && c.orientable;

            std::vector<int> node_mults;
            bool ok = true;
            int sum_I = 0;
            for (const auto& c : lv->singular_points) sum_I += c.index;
            for (const auto& grp : groups) {
                LimitComponent w;
                std::vector<int> em;
                if (!fill_component(w, em, grp, pick_orientable())) { ok = false; break; }
                node_mults.insert(node_mults.end(), em.begin(), em.end());
                sum_I += w.index;
                orientable_level = orientable_level && w.orientable;
                lv->components.push_back(w);
            }
            if (!ok) continue;

            DeltaNode n;
            n.orientable = orientable_level;
            n.index = sum_I + (d_.chance(1, 4) ? 1 : 0);
            n.ends = static_cast<int>(node_mults.size());
            n.spinning = std::accumulate(node_mults.begin(), node_mults.end(), 0);
            int chi = 0, child_S = 0, child_e = 0;
            for (const auto& c : lv->singular_points) {
                chi += c.euler_char;
                child_S += c.spinning;
                child_e += c.ends;
            }
            for (const auto& w : lv->components) chi += w.euler_char() - w.boundary_disks;
            n.euler_char = chi;
            if (n.orientable) {
                if (mod2(2 - n.ends - chi) != 0) continue;
                n.genus = (2 - n.ends - chi) / 2;
            } else {
                n.genus = 1 - n.ends - chi;
            }
            if (n.genus < 0) continue;
            lv->level_ends = n.ends;
            lv->level_spinning = n.spinning;
            lv->branching = child_S - child_e;
            n.level = lv;

            std::vector<Violation> v;
            for_each_node(n, [&](const DeltaNode& x, const std::string& path) { validate_node(x, path, v); });
            const auto s = stats(n);
            if (!v.empty() || s.L + 1 > n.index) continue;
            return {n, node_mults};
        }
        throw HierarchyError("random_hierarchy: level generation failed after " + std::to_string(kAttempts) + " attempts");
    }

    // Split curves into components whose point sets link every singular point.
    std::vector<std::vector<std::pair<int, int>>> assign_curves(std::vector<std::pair<int, int>> curves, int k) {
        const int n = static_cast<int>(curves.size());
        for (int attempt = 0; attempt < 50; ++attempt) {
            const int c = d_.in(1, std::min(n, 4));
            for (int i = n - 1; i > 0; --i) std::swap(curves[static_cast<size_t>(i)], curves[static_cast<size_t>(d_.in(0, i))]);
            std::vector<std::vector<std::pair<int, int>>> groups(static_cast<size_t>(c));
            for (int i = 0; i < n; ++i) groups[static_cast<size_t>(i < c ? i : d_.in(0, c - 1))].push_back(curves[static_cast<size_t>(i)]);
            LevelRecord probe;
            probe.singular_points.resize(static_cast<size_t>(k));
            for (const auto& g : groups) {
                LimitComponent w;
                std::set<int> pts;
                for (const auto& cv : g) pts.insert(cv.first);
                w.points.assign(pts.begin(), pts.end());
                probe.components.push_back(w);
            }
            if (components_connected(probe)) return groups;
        }
        return {curves};
    }
};

} // namespace detail

/// Deterministic by seed; every output satisfies validate() by construction.
inline Hierarchy random_hierarchy(std::uint64_t seed, HierarchyCaps caps = {}) {
    if (caps.max_depth < 1 || caps.max_children < 1 || caps.max_index < 1)
        throw std::invalid_argument("random_hierarchy: caps must be positive");
    return detail::HierarchyGenerator(seed, caps).run();
}

} // namespace cmc
