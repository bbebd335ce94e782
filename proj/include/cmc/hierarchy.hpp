#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmc/invariants.hpp"
#include "cmc/report.hpp"

namespace cmc {

/// A component W of the limit surface of one level.
/// `points` lists the distinct singular points (indices into the level) that W meets,
/// so attached_singular() is the identified-point count.
struct LimitComponent {
    bool flat = false;
    bool orientable = true;
    int index = 0;
    int own_ends = 1;
    int genus = 0;
    std::vector<int> points;
    int boundary_disks = 0;

    int attached_singular() const { return static_cast<int>(points.size()); }
    int euler_char() const { return orientable ? 2 - 2 * genus - own_ends : 1 - genus - own_ends; }
};

struct DeltaNode;

struct LevelRecord {
    std::vector<DeltaNode> singular_points;  // child piece per identified point q
    std::vector<LimitComponent> components;
    int level_ends = 0;
    int level_spinning = 0;
    std::optional<int> branching;
};

struct DeltaNode {
    int index = 1;
    int ends = 1;
    int spinning = 2;
    int euler_char = 0;
    int genus = 0;
    bool orientable = true;
    std::shared_ptr<LevelRecord> level;  // null for minimal elements

    bool minimal() const { return level == nullptr; }
};

struct Hierarchy {
    DeltaNode root;
};

class HierarchyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------ traversal

namespace detail {

template <class F>
void walk(const DeltaNode& n, const std::string& path, std::set<const LevelRecord*>& on_path, F&& f) {
    f(n, path);
    if (!n.level) return;
    if (!on_path.insert(n.level.get()).second) throw HierarchyError("cyclic hierarchy at " + path);
    for (size_t q = 0; q < n.level->singular_points.size(); ++q)
        walk(n.level->singular_points[q], path + "/q" + std::to_string(q), on_path, f);
    on_path.erase(n.level.get());
}

} // namespace detail

/// Visit every node with its path ("root", "root/q0", ...). Throws on cycles.
template <class F>
void for_each_node(const DeltaNode& root, F&& f) {
    std::set<const LevelRecord*> on_path;
    detail::walk(root, "root", on_path, f);
}

// ------------------------------------------------------------------ derived data

struct Census {
    int trivial = 0;           // flat, one identified point
    int nt_flat = 0;           // flat, more than one identified point
    int nt_nf_d1 = 0;          // non-flat, one identified point
    int nt_nf_or_dgt1 = 0;     // non-flat orientable, more than one point
    int nt_nf_no_dgt1 = 0;     // non-flat non-orientable, more than one point
    int w_star = 0;            // non-orientable, one point, more than one disk
    int detached = 0;          // no singular point (excluded from everything above)

    Census& operator+=(const Census& o) {
        trivial += o.trivial; nt_flat += o.nt_flat; nt_nf_d1 += o.nt_nf_d1;
        nt_nf_or_dgt1 += o.nt_nf_or_dgt1; nt_nf_no_dgt1 += o.nt_nf_no_dgt1;
        w_star += o.w_star; detached += o.detached;
        return *this;
    }
};

inline Census classify(const LimitComponent& w) {
    Census c;
    const int a = w.attached_singular();
    if (a == 0) { c.detached = 1; return c; }
    if (w.flat) {
        if (a == 1) c.trivial = 1;
        else c.nt_flat = 1;
    } else if (a == 1) {
        c.nt_nf_d1 = 1;
    } else if (w.orientable) {
        c.nt_nf_or_dgt1 = 1;
    } else {
        c.nt_nf_no_dgt1 = 1;
    }
    if (!w.orientable && a == 1 && w.boundary_disks > 1) c.w_star = 1;
    return c;
}

inline Census level_census(const LevelRecord& lv) {
    Census c;
    for (const auto& w : lv.components) c += classify(w);
    return c;
}

struct HierarchyStats {
    int L = 0;               // non-minimal nodes
    int S_hat = 0;           // singular points over all levels
    int minimal_count = 0;
    int nonminimal_count = 0;
    int O = 0;               // levels with a single singular point
    int excess = 0;          // sum over minimal nodes of (I - 1)
    Census census;
    bool trivial() const { return L == 0; }
};

inline HierarchyStats stats(const DeltaNode& root) {
    HierarchyStats s;
    for_each_node(root, [&](const DeltaNode& n, const std::string&) {
        if (n.minimal()) {
            ++s.minimal_count;
            s.excess += n.index - 1;
        } else {
            ++s.nonminimal_count;
            ++s.L;
            const int k = static_cast<int>(n.level->singular_points.size());
            s.S_hat += k;
            if (k == 1) ++s.O;
            s.census += level_census(*n.level);
        }
    });
    return s;
}

inline HierarchyStats stats(const Hierarchy& h) { return stats(h.root); }

// ------------------------------------------------------------------ validation

struct Violation {
    std::string path;
    std::string rule;
};

inline std::string to_string(const Violation& v) { return v.path + ": " + v.rule; }

inline bool components_connected(const LevelRecord& lv) {
    const int P = static_cast<int>(lv.singular_points.size());
    std::vector<int> comps;
    for (size_t i = 0; i < lv.components.size(); ++i)
        if (lv.components[i].attached_singular() > 0) comps.push_back(static_cast<int>(i));
    if (P == 0) return true;
    // union-find over points joined through components
    std::vector<int> parent(static_cast<size_t>(P));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int ci : comps) {
        const auto& pts = lv.components[static_cast<size_t>(ci)].points;
        for (size_t k = 1; k < pts.size(); ++k) {
            if (pts[k] < 0 || pts[k] >= P || pts[0] < 0 || pts[0] >= P) continue;
            parent[find(pts[k])] = find(pts[0]);
        }
    }
    const int r0 = find(0);
    for (int p = 1; p < P; ++p)
        if (find(p) != r0) return false;
    return true;
}

inline void validate_component(const LimitComponent& w, int P, const std::string& path, std::vector<Violation>& out) {
    auto bad = [&](const std::string& rule) { out.push_back({path, rule}); };
    if (w.index < 0) bad("component index >= 0");
    if (w.own_ends < 0) bad("own_ends >= 0");
    if (w.genus < 0) bad("component genus >= 0");
    std::set<int> seen;
    for (int p : w.points) {
        if (p < 0 || p >= P) bad("point index " + std::to_string(p) + " out of range");
        if (!seen.insert(p).second) bad("duplicate point " + std::to_string(p) + " in component");
    }
    if (w.boundary_disks < w.attached_singular()) bad("boundary_disks >= attached_singular");
    if (w.flat && w.index != 0) bad("flat => index = 0");
    if (w.flat && !w.orientable) bad("flat => orientable");
    if (!w.flat && w.orientable && w.index < 1) bad("non-flat orientable => index >= 1");
    if (!w.orientable && w.attached_singular() == 1 && w.boundary_disks > 1 && w.index < 2)
        bad("non-orientable, one singular point, several disks => index >= 2");
}

inline void validate_node(const DeltaNode& n, const std::string& path, std::vector<Violation>& out) {
    auto bad = [&](const std::string& rule) { out.push_back({path, rule}); };
    if (n.index < 1) bad("I(Delta) >= 1");
    if (n.ends < 1) bad("e(Delta) >= 1");
    if (n.spinning < 2) bad("S(Delta) >= 2");
    if (n.spinning < n.ends) bad("S(Delta) >= e(Delta)");
    if (n.ends + n.spinning < 4) bad("e + S >= 4");
    if (n.genus < 0) bad("genus >= 0");
    const int chi = n.orientable ? 2 - 2 * n.genus - n.ends : 1 - n.genus - n.ends;
    if (chi != n.euler_char) bad("euler_char consistent with genus, ends and orientability");
    if (n.minimal()) {
        if (!n.orientable && n.index < 2) bad("minimal non-orientable => I >= 2");
        if (!n.orientable && n.spinning < 3) bad("minimal non-orientable => S >= 3");
        return;
    }
    const LevelRecord& lv = *n.level;
    const int P = static_cast<int>(lv.singular_points.size());
    if (P == 0) bad("level has at least one singular point");
    if (lv.components.empty()) bad("level has at least one component");
    if (lv.level_ends != n.ends) bad("level_ends = e(Delta)");
    if (lv.level_spinning != n.spinning) bad("level_spinning = S(Delta)");

    int sum_own_ends = 0, sum_disks = 0, sum_comp_index = 0, chi_w = 0;
    for (size_t i = 0; i < lv.components.size(); ++i) {
        const auto& w = lv.components[i];
        validate_component(w, P, path + "/W" + std::to_string(i), out);
        sum_own_ends += w.own_ends;
        sum_disks += w.boundary_disks;
        sum_comp_index += w.index;
        chi_w += w.euler_char() - w.boundary_disks;
        if (n.orientable && !w.orientable) bad("orientable Delta => orientable components");
    }
    int sum_child_e = 0, sum_child_S = 0, sum_child_I = 0, chi_children = 0;
    for (const auto& c : lv.singular_points) {
        sum_child_e += c.ends;
        sum_child_S += c.spinning;
        sum_child_I += c.index;
        chi_children += c.euler_char;
        if (n.orientable && !c.orientable) bad("orientable Delta => orientable children");
    }
    if (sum_own_ends != lv.level_ends) bad("sum of component ends = level_ends");
    if (sum_child_e != sum_disks) bad("sum of child boundary curves = sum of boundary disks");
    if (lv.branching && *lv.branching != sum_child_S - sum_child_e) bad("B(level) = S(children) - e(children)");
    if (n.euler_char != chi_children + chi_w) bad("euler_char additive over children and components");
    if (n.index < sum_child_I + sum_comp_index) bad("I(Delta) >= sum child I + sum component I");

    std::vector<int> cover(static_cast<size_t>(P), 0);
    bool has_nonflat_attached = false;
    for (const auto& w : lv.components) {
        for (int p : w.points)
            if (p >= 0 && p < P) ++cover[static_cast<size_t>(p)];
        if (!w.flat && w.attached_singular() > 0) has_nonflat_attached = true;
    }
    for (int p = 0; p < P; ++p)
        if (cover[static_cast<size_t>(p)] == 0) bad("singular point q" + std::to_string(p) + " meets no component");
    if (P > 0 && !components_connected(lv)) bad("incidence of components and singular points is connected");
    if (P == 1 && !has_nonflat_attached) bad("single singular point => some non-flat component");
}

/// All violated rules, each tagged with the node path. Throws HierarchyError on cycles.
inline std::vector<Violation> validate(const Hierarchy& h) {
    std::vector<Violation> out;
    for_each_node(h.root, [&](const DeltaNode& n, const std::string& path) { validate_node(n, path, out); });
    const auto s = stats(h);
    if (s.S_hat + 1 != s.minimal_count + s.nonminimal_count) out.push_back({"root", "|S| + 1 = |V^m| + |V^nm|"});
    if (s.S_hat < s.L) out.push_back({"root", "|S| >= L"});
    if (s.L + 1 > h.root.index) out.push_back({"root", "L + 1 <= I(Delta)"});
    return out;
}

// ------------------------------------------------------------------ correction terms

enum class Variant { general, orientable, nonorientable };

inline std::string to_string(Variant v) {
    switch (v) {
    case Variant::general: return "general";
    case Variant::orientable: return "orientable";
    case Variant::nonorientable: return "nonorientable";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "general") return Variant::general;
    if (s == "orientable") return Variant::orientable;
    if (s == "nonorientable") return Variant::nonorientable;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

inline int excess_index(const Hierarchy& h) { return stats(h).excess; }

inline int correction_term(const HierarchyStats& s, Variant v) {
    const auto& c = s.census;
    switch (v) {
    case Variant::general:
        return 3 * s.excess + s.S_hat - s.L + c.nt_flat + 2 * c.nt_nf_d1 + 3 * c.nt_nf_or_dgt1;
    case Variant::nonorientable:
        return correction_term(s, Variant::general) + 6 * c.w_star;
    case Variant::orientable:
        return 3 * s.excess + 2 * (s.S_hat - s.L) + 2 * c.nt_nf_d1 + 3 * c.nt_nf_or_dgt1;
    }
    return 0;
}

inline int correction_term(const Hierarchy& h, Variant v) {
    if (v == Variant::orientable && !h.root.orientable)
        throw std::invalid_argument("orientable correction term requested for a non-orientable root");
    if (v == Variant::nonorientable && h.root.orientable)
        throw std::invalid_argument("non-orientable correction term requested for an orientable root");
    const int C = correction_term(stats(h), v);
    if (v == Variant::general && C < 0) throw HierarchyError("general correction term is negative");
    return C;
}

// ------------------------------------------------------------------ inequalities

inline int index_rhs_base(const DeltaNode& n) { return -n.euler_char + 2 * n.spinning + n.ends; }

/// 6 I >= -chi + 2S + e + C for every applicable variant, plus the lower bounds on C.
inline VerificationReport main_inequality(const Hierarchy& h) {
    VerificationReport rep{"main_inequality", {}};
    const auto s = stats(h);
    const int lhs = 6 * h.root.index;
    const int base = index_rhs_base(h.root);
    const int C = correction_term(s, Variant::general);
    rep.add_geq("C(H) >= 0", C, 0);
    rep.add_geq("6I >= -chi+2S+e+C", lhs, base + C);
    if (h.root.orientable) {
        // same display in genus form
        const int alt = 2 * h.root.genus + 2 * h.root.spinning + 2 * h.root.ends - 2 + C;
        rep.add_geq("6I >= 2g+2S+2e-2#c+C", lhs, alt);
        const int Cor = correction_term(s, Variant::orientable);
        rep.add_geq("6I >= -chi+2S+e+C_or", lhs, base + Cor);
        rep.add_geq("C_or >= 3I*+2(|S|-L)+2O", Cor, 3 * s.excess + 2 * (s.S_hat - s.L) + 2 * s.O);
        rep.add_geq("3I*+2(|S|-L)+2O >= 2L", 3 * s.excess + 2 * (s.S_hat - s.L) + 2 * s.O, 2 * s.L);
    } else {
        const int Cno = correction_term(s, Variant::nonorientable);
        rep.add_geq("6I >= -chi+2S+e+C_no", lhs, base + Cno);
        rep.add_geq("C_no >= 3I*+|S|-L+2O", Cno, 3 * s.excess + s.S_hat - s.L + 2 * s.O);
        rep.add_geq("3I*+|S|-L+2O >= L", 3 * s.excess + s.S_hat - s.L + 2 * s.O, s.L);
    }
    return rep;
}

/// Per-level versions of the corollary bounds (each level detached with its own children).
inline VerificationReport per_level_bounds(const Hierarchy& h) {
    VerificationReport rep{"per_level_bounds", {}};
    for_each_node(h.root, [&](const DeltaNode& n, const std::string& path) {
        if (n.minimal()) return;
        const auto& lv = *n.level;
        int excess = 0;
        for (const auto& c : lv.singular_points)
            if (c.minimal()) excess += c.index - 1;
        const int P = static_cast<int>(lv.singular_points.size());
        const int O = P == 1 ? 1 : 0;
        const Census c = level_census(lv);
        const int C = 3 * excess + (P - 1) + c.nt_flat + 2 * c.nt_nf_d1 + 3 * c.nt_nf_or_dgt1;
        const int Cno = C + 6 * c.w_star;
        const int mid = 3 * excess + (P - 1) + 2 * O;
        rep.add_geq(path + ": C_no(H') >= 3I*+|S|-1+2O", Cno, mid);
        rep.add_geq(path + ": 3I*+|S|-1+2O >= 1", mid, 1);
        if (n.orientable) {
            const int Cor = 3 * excess + 2 * (P - 1) + 2 * c.nt_nf_d1 + 3 * (c.nt_nf_or_dgt1 + c.nt_nf_no_dgt1);
            const int mid_or = 3 * excess + 2 * (P - 1) + 2 * O;
            rep.add_geq(path + ": C_or(H') >= 3I*+2(|S|-1)+2O", Cor, mid_or);
            rep.add_geq(path + ": 3I*+2(|S|-1)+2O >= 2", mid_or, 2);
        }
    });
    return rep;
}

/// Caps on genus, ends and spinning of a piece in terms of its index and number of levels.
inline VerificationReport delta_complexity_bounds(const DeltaNode& n) {
    VerificationReport rep{"delta_complexity_bounds", {}};
    const auto s = stats(n);
    const int I = n.index, g = n.genus, e = n.ends, S = n.spinning, L = s.L;
    if (I == 1) {
        rep.add_flag("I=1 => trivial", s.trivial());
        rep.add_flag("I=1 => orientable", n.orientable);
        rep.add_flag("I=1 => g=0", g == 0);
        rep.add_flag("I=1 => (e,S) in {(2,2),(1,3)}", (e == 2 && S == 2) || (e == 1 && S == 3));
    }
    if (s.trivial()) {
        if (n.orientable) {
            rep.add_leq("2g <= 3I-3", 2 * g, 3 * I - 3);
            rep.add_leq("2e <= 3I+1", 2 * e, 3 * I + 1);
            rep.add_leq("2S <= 3I+3", 2 * S, 3 * I + 3);
        } else {
            rep.add_geq("I >= 2", I, 2);
            rep.add_geq("S >= 3", S, 3);
            rep.add_leq("g <= 3I-4", g, 3 * I - 4);
            rep.add_leq("2e <= 3I-2", 2 * e, 3 * I - 2);
            rep.add_leq("2S <= 3I+2", 2 * S, 3 * I + 2);
        }
    } else {
        rep.add_geq("S >= 2", S, 2);
        rep.add_geq("I >= L+1", I, L + 1);
        if (n.orientable) {
            rep.add_leq("g <= 3I-L-3", g, 3 * I - L - 3);
            rep.add_leq("e <= 3I-L-1", e, 3 * I - L - 1);
            rep.add_leq("S <= 3I-L", S, 3 * I - L);
        } else {
            rep.add_leq("g <= 6I-L-7", g, 6 * I - L - 7);
            rep.add_leq("2e <= 6I-L-3", 2 * e, 6 * I - L - 3);
            rep.add_leq("2S <= 6I-L-1", 2 * S, 6 * I - L - 1);
        }
    }
    if (!n.orientable || I >= 2) {
        rep.add_leq("m <= 3I-1", S, 3 * I - 1);
        rep.add_leq("e <= 3I-2", e, 3 * I - 2);
        if (n.orientable) rep.add_leq("g <= 3I-4", g, 3 * I - 4);
        else rep.add_leq("g <= 6I-8", g, 6 * I - 8);
    }
    rep.add_geq("chi >= -6I+2m+e", n.euler_char, -6 * I + 2 * S + e);
    return rep;
}

// ------------------------------------------------------------------ branching

struct Branching {
    int S = 0;
    int B = 0;
    VerificationReport checks{"branching_contribution", {}};
};

/// Spinning and branching of a set of boundary curves with multiplicities m.
/// With an index supplied, also S <= 3I, and (with I0, J) sum(S - e) <= 3 I0 - J, B <= 3 I0 - 1.
inline Branching branching_contribution(const std::vector<int>& m, std::optional<int> index = std::nullopt,
                                        std::optional<int> I0 = std::nullopt, int J = 1) {
    if (m.empty()) throw std::invalid_argument("branching_contribution: empty multiplicity list");
    for (int x : m)
        if (x < 1) throw std::invalid_argument("branching_contribution: multiplicities must be >= 1");
    Branching b;
    b.S = std::accumulate(m.begin(), m.end(), 0);
    b.B = b.S - static_cast<int>(m.size());
    if (index) b.checks.add_leq("S <= 3I", b.S, 3 * *index);
    if (I0) {
        b.checks.add_leq("sum(S - e) <= 3 I0 - J", b.B, 3 * *I0 - J);
        b.checks.add_leq("B <= 3 I0 - 1", b.B, 3 * *I0 - 1);
    }
    return b;
}

// ------------------------------------------------------------------ json

inline json to_json(const LimitComponent& w) {
    return json{{"flat", w.flat}, {"orientable", w.orientable}, {"index", w.index}, {"own_ends", w.own_ends},
                {"genus", w.genus}, {"points", w.points}, {"attached_singular", w.attached_singular()},
                {"boundary_disks", w.boundary_disks}};
}

inline json to_json(const DeltaNode& n) {
    json j{{"index", n.index}, {"ends", n.ends}, {"spinning", n.spinning}, {"euler_char", n.euler_char},
           {"genus", n.genus}, {"orientable", n.orientable}};
    if (n.level) {
        json kids = json::array();
        for (const auto& c : n.level->singular_points) kids.push_back(to_json(c));
        json comps = json::array();
        for (const auto& w : n.level->components) comps.push_back(to_json(w));
        json lv{{"singular_points", kids}, {"components", comps}, {"level_ends", n.level->level_ends},
                {"level_spinning", n.level->level_spinning}};
        if (n.level->branching) lv["branching"] = *n.level->branching;
        j["level"] = lv;
    }
    return j;
}

inline json to_json(const Hierarchy& h) { return json{{"root", to_json(h.root)}}; }

inline LimitComponent component_from_json(const json& j, int n_points) {
    LimitComponent w;
    w.flat = j.at("flat").get<bool>();
    w.orientable = j.value("orientable", true);
    w.index = j.at("index").get<int>();
    w.own_ends = j.at("own_ends").get<int>();
    w.genus = j.value("genus", 0);
    w.boundary_disks = j.at("boundary_disks").get<int>();
    if (j.contains("points")) {
        w.points = j.at("points").get<std::vector<int>>();
        if (j.contains("attached_singular") && j.at("attached_singular").get<int>() != w.attached_singular())
            throw std::invalid_argument("attached_singular disagrees with points");
    } else {
        // without explicit points the count must be 0 or all points of the level
        const int a = j.value("attached_singular", 0);
        if (a != 0 && a != n_points)
            throw std::invalid_argument("component needs 'points' when it meets only some singular points");
        for (int p = 0; p < a; ++p) w.points.push_back(p);
    }
    return w;
}

inline DeltaNode node_from_json(const json& j, int depth = 0) {
    if (depth > 256) throw HierarchyError("hierarchy nesting too deep");
    DeltaNode n;
    n.index = j.at("index").get<int>();
    n.ends = j.at("ends").get<int>();
    n.spinning = j.at("spinning").get<int>();
    n.euler_char = j.at("euler_char").get<int>();
    n.genus = j.value("genus", 0);
    n.orientable = j.value("orientable", true);
    if (j.contains("level") && !j.at("level").is_null()) {
        const json& lj = j.at("level");
        auto lv = std::make_shared<LevelRecord>();
        for (const auto& c : lj.at("singular_points")) lv->singular_points.push_back(node_from_json(c, depth + 1));
        for (const auto& c : lj.at("components")) lv->components.push_back(component_from_json(c, static_cast<int>(lv->singular_points.size())));
        lv->level_ends = lj.at("level_ends").get<int>();
        lv->level_spinning = lj.at("level_spinning").get<int>();
        if (lj.contains("branching")) lv->branching = lj.at("branching").get<int>();
        n.level = lv;
    }
    return n;
}

inline Hierarchy hierarchy_from_json(const json& j) {
    Hierarchy h;
    h.root = node_from_json(j.contains("root") ? j.at("root") : j);
    return h;
}

// ------------------------------------------------------------------ builders

/// Minimal element from a topology (no level).
inline DeltaNode minimal_node(bool orientable, int genus, int ends, int spinning, int index) {
    DeltaNode n;
    n.orientable = orientable;
    n.genus = genus;
    n.ends = ends;
    n.spinning = spinning;
    n.index = index;
    n.euler_char = orientable ? 2 - 2 * genus - ends : 1 - genus - ends;
    return n;
}

inline Hierarchy trivial_hierarchy(const DeltaNode& n) {
    Hierarchy h;
    h.root = n;
    h.root.level.reset();
    return h;
}

} // namespace cmc
