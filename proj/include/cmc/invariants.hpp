#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmc/report.hpp"

namespace cmc {

/// Topology of a complete, finitely branched minimal surface.
/// For non-orientable surfaces `genus` is the genus of the oriented double cover
/// (equivalently, number of cross-caps minus one).
struct TopologyProfile {
    bool orientable = true;
    int genus = 0;
    std::vector<int> ends;           // multiplicities d_j
    std::vector<int> branch_orders;  // B(p) per branch point
    std::optional<int> branch_image_points;  // |f(branch set)|, defaults to #branch points

    int e() const { return static_cast<int>(ends.size()); }
    int S() const { return std::accumulate(ends.begin(), ends.end(), 0); }
    int B() const { return std::accumulate(branch_orders.begin(), branch_orders.end(), 0); }
    int chi() const { return orientable ? 2 - 2 * genus - e() : 1 - genus - e(); }
    /// Euler characteristic of the conformal compactification.
    int chi_closed() const { return chi() + e(); }
    int image_points() const {
        return branch_image_points.value_or(static_cast<int>(branch_orders.size()));
    }
};

inline TopologyProfile make_profile(bool orientable, int genus, std::vector<int> ends, std::vector<int> branch = {}) {
    TopologyProfile p;
    p.orientable = orientable;
    p.genus = genus;
    p.ends = std::move(ends);
    p.branch_orders = std::move(branch);
    return p;
}

inline TopologyProfile catenoid_profile() { return make_profile(true, 0, {1, 1}); }
inline TopologyProfile enneper_profile() { return make_profile(true, 0, {3}); }
inline TopologyProfile plane_profile() { return make_profile(true, 0, {1}); }

/// Structural problems only; parity is reported by parity_check.
inline std::vector<std::string> profile_issues(const TopologyProfile& p) {
    std::vector<std::string> out;
    if (p.genus < 0) out.push_back("genus must be >= 0");
    if (p.ends.empty()) out.push_back("at least one end required");
    for (int d : p.ends)
        if (d < 1) { out.push_back("end multiplicities must be >= 1"); break; }
    for (int b : p.branch_orders)
        if (b < 1) { out.push_back("branch orders must be >= 1"); break; }
    if (p.branch_image_points && (*p.branch_image_points < 0 ||
                                  *p.branch_image_points > static_cast<int>(p.branch_orders.size())))
        out.push_back("branch_image_points must lie in [0, #branch points]");
    return out;
}

inline void require_valid(const TopologyProfile& p) {
    const auto issues = profile_issues(p);
    if (!issues.empty()) throw std::invalid_argument("invalid profile: " + issues.front());
}

inline json to_json(const TopologyProfile& p) {
    json j{{"orientable", p.orientable}, {"genus", p.genus}, {"ends", p.ends}, {"branch_orders", p.branch_orders}};
    if (p.branch_image_points) j["branch_image_points"] = *p.branch_image_points;
    return j;
}

inline TopologyProfile profile_from_json(const json& j) {
    TopologyProfile p;
    p.orientable = j.at("orientable").get<bool>();
    p.genus = j.at("genus").get<int>();
    p.ends = j.at("ends").get<std::vector<int>>();
    if (j.contains("branch_orders")) p.branch_orders = j.at("branch_orders").get<std::vector<int>>();
    if (j.contains("branch_image_points")) p.branch_image_points = j.at("branch_image_points").get<int>();
    require_valid(p);
    return p;
}

// ----------------------------------------------------------------- integer helpers

inline int ceil_div(int a, int b) {
    // b > 0
    int q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return q;
}

inline int mod2(int a) { return ((a % 2) + 2) % 2; }

// ----------------------------------------------------------------- operations

/// (1/2pi) * total curvature + S - B - chi.
inline double jorge_meeks_residual(const TopologyProfile& p, double measured_total_curvature) {
    require_valid(p);
    return measured_total_curvature / (2.0 * std::numbers::pi) + p.S() - p.B() - p.chi();
}

/// Flat-quotient variant: ends asymptotic to flat annuli carry no spinning, so the
/// identity reduces to (1/2pi) int K = chi.
inline double jorge_meeks_residual_annular(int chi, double measured_total_curvature) {
    return measured_total_curvature / (2.0 * std::numbers::pi) - chi;
}

struct ParityResult {
    bool pass = true;        // S - B = e (mod 2), and the degree parity when checked
    bool spin_parity = true;
    std::optional<int> degree;             // rounded (1/2pi) * total curvature
    std::optional<bool> degree_parity;     // degree = chi(closed) (mod 2)
    bool degree_flagged = false;           // measured total not within 0.05 of an integer
};

inline ParityResult parity_check(const TopologyProfile& p, std::optional<double> measured_total = std::nullopt) {
    require_valid(p);
    ParityResult r;
    r.spin_parity = mod2(p.S() - p.B()) == mod2(p.e());
    r.pass = r.spin_parity;
    if (measured_total) {
        const double deg = *measured_total / (2.0 * std::numbers::pi);
        const double rd = std::round(deg);
        if (std::fabs(deg - rd) > 0.05) {
            r.degree_flagged = true;
        } else {
            r.degree = static_cast<int>(rd);
            r.degree_parity = mod2(*r.degree) == mod2(p.chi_closed());
            r.pass = r.pass && *r.degree_parity;
        }
    }
    return r;
}

struct CmBound {
    int unified_rhs = 0;            // -chi + 2S + e - 2B - 3
    int unified = 0;                // ceil(unified_rhs / 3), clamped at 0
    int split_rhs = 0;              // orientable: 2g + 2 sum(d+1) - 2B - 5; else g + 2 sum(d+1) - 2B - 4
    int split = 0;
    int bound = 0;                  // max of the two
};

/// Lower bound on the index from 3I >= RHS.
inline CmBound cm_index_lower_bound(const TopologyProfile& p) {
    require_valid(p);
    CmBound b;
    const int S = p.S(), e = p.e(), B = p.B(), g = p.genus;
    b.unified_rhs = -p.chi() + 2 * S + e - 2 * B - 3;
    b.unified = std::max(0, ceil_div(b.unified_rhs, 3));
    const int sum_d1 = S + e;
    b.split_rhs = p.orientable ? 2 * g + 2 * sum_d1 - 2 * B - 5 : g + 2 * sum_d1 - 2 * B - 4;
    b.split = std::max(0, ceil_div(b.split_rhs, 3));
    b.bound = std::max(b.unified, b.split);
    return b;
}

/// Strengthened bound when the index is known to be even: smallest even I with 3I >= RHS + 1.
inline int cm_index_lower_bound_even(const TopologyProfile& p) {
    const auto b = cm_index_lower_bound(p);
    int I = std::max(0, ceil_div(std::max(b.unified_rhs, b.split_rhs) + 1, 3));
    if (I % 2) ++I;
    return I;
}

struct StabilityRules {
    std::vector<std::string> violations;
    int implied_min_index = 0;
};

/// Consequences of stability and of having few branch values, for a non-flat surface:
/// orientable forces index >= 1, non-orientable with <= 1 branch value forces index >= 2.
inline StabilityRules stability_rules_check(const TopologyProfile& p, bool stable, bool flat = false) {
    require_valid(p);
    StabilityRules r;
    if (flat) return r;
    const bool few_branch_values = p.image_points() <= 1;
    if (p.orientable) r.implied_min_index = 1;
    else if (few_branch_values) r.implied_min_index = 2;
    if (stable) {
        if (p.orientable) r.violations.push_back("stable and non-flat but orientable");
        if (few_branch_values) r.violations.push_back("stable and non-flat but branch image has <= 1 point");
    }
    return r;
}

/// Non-flat limits satisfy sum(d_j + 1) >= 4.
inline bool spinning_ends_floor(const TopologyProfile& p) {
    require_valid(p);
    return p.S() + p.e() >= 4;
}

/// g(Sigma) <= g(Sigma~) + g(Delta) + #boundary(Delta) - #components(Delta).
inline bool genus_subsurface_check(int g_sigma, int g_delta, int g_sigma_tilde, int n_boundary_delta, int n_components_delta) {
    if (g_sigma < 0 || g_delta < 0 || g_sigma_tilde < 0 || n_boundary_delta < 0)
        throw std::invalid_argument("genus_subsurface_check: arguments must be non-negative");
    if (n_components_delta < 1) throw std::invalid_argument("genus_subsurface_check: need >= 1 component");
    return g_sigma <= g_sigma_tilde + g_delta + n_boundary_delta - n_components_delta;
}

inline int genus_drop_bound(int I, int k) {
    if (I < 1) throw std::invalid_argument("genus_drop_bound: I must be >= 1");
    if (k < 1 || k > I) throw std::invalid_argument("genus_drop_bound: need 1 <= k <= I");
    return 3 * I - 2 * k;
}

// ----------------------------------------------------------------- census

struct ProfileCensus {
    long profiles = 0;              // enumerated profiles satisfying parity
    long unified_exceeds_split = 0; // unified > split + 1
    long negative_bound = 0;
    long identity_mismatch = 0;     // unified_rhs != split_rhs (the two forms agree algebraically)
    long inconsistencies() const { return unified_exceeds_split + negative_bound; }
};

/// Enumerate all profiles with g <= gmax, 1 <= e <= emax, 1 <= d_j <= dmax (as multisets),
/// total branching B <= bmax (as partitions), both orientabilities, parity enforced.
inline ProfileCensus profile_census(int gmax = 3, int emax = 4, int dmax = 4, int bmax = 3) {
    ProfileCensus c;
    // multisets of end multiplicities
    std::vector<std::vector<int>> end_sets;
    std::vector<int> cur;
    auto rec_ends = [&](auto&& self, int start, int left) -> void {
        if (!cur.empty()) end_sets.push_back(cur);
        if (left == 0) return;
        for (int d = start; d <= dmax; ++d) {
            cur.push_back(d);
            self(self, d, left - 1);
            cur.pop_back();
        }
    };
    rec_ends(rec_ends, 1, emax);
    // partitions of each B <= bmax into branch orders
    std::vector<std::vector<int>> branch_sets;
    auto rec_branch = [&](auto&& self, int maxpart, int left) -> void {
        if (left == 0) { branch_sets.push_back(cur); return; }
        for (int b = std::min(maxpart, left); b >= 1; --b) {
            cur.push_back(b);
            self(self, b, left - b);
            cur.pop_back();
        }
    };
    for (int B = 0; B <= bmax; ++B) {
        cur.clear();
        rec_branch(rec_branch, B, B);
    }
    for (int orient = 0; orient < 2; ++orient)
        for (int g = 0; g <= gmax; ++g)
            for (const auto& ends : end_sets)
                for (const auto& br : branch_sets) {
                    TopologyProfile p = make_profile(orient == 1, g, ends, br);
                    if (!parity_check(p).spin_parity) continue;
                    ++c.profiles;
                    const auto b = cm_index_lower_bound(p);
                    if (b.unified > b.split + 1) ++c.unified_exceeds_split;
                    if (b.bound < 0) ++c.negative_bound;
                    if (b.unified_rhs != b.split_rhs) ++c.identity_mismatch;
                }
    return c;
}

} // namespace cmc
