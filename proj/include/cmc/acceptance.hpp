#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cmc/bounds.hpp"
#include "cmc/hierarchy.hpp"
#include "cmc/hierarchy_random.hpp"
#include "cmc/incidence.hpp"
#include "cmc/invariants.hpp"
#include "cmc/mesh.hpp"
#include "cmc/multigraph.hpp"
#include "cmc/parallel.hpp"
#include "cmc/report.hpp"
#include "cmc/spectral.hpp"
#include "cmc/weierstrass.hpp"

namespace cmc {

struct AcceptanceConfig {
    std::uint64_t seed = 0;       // first fuzz seed
    int fuzz_count = 10000;
    int threads = worker_count();
};

inline json to_json(const AcceptanceConfig& c) {
    return json{{"seed", c.seed}, {"fuzz_count", c.fuzz_count}};
}

struct CriterionResult {
    int id = 0;
    std::string title;
    VerificationReport checks;
    json details = json::object();
    double seconds = 0;  // kept out of the deterministic report

    bool pass() const { return checks.pass(); }
};

struct AcceptanceReport {
    AcceptanceConfig config;
    std::vector<CriterionResult> criteria;

    bool pass() const {
        for (const auto& c : criteria)
            if (!c.pass()) return false;
        return true;
    }
};

/// Deterministic part only; timings go to acceptance_meta().
inline json to_json(const AcceptanceReport& r) {
    json list = json::array();
    for (const auto& c : r.criteria)
        list.push_back(json{{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"checks", to_json(c.checks)["checks"]},
                            {"details", c.details}});
    return json{{"suite", "primary"}, {"config", to_json(r.config)}, {"pass", r.pass()}, {"criteria", list}};
}

inline json acceptance_meta(const AcceptanceReport& r) {
    json t = json::object();
    for (const auto& c : r.criteria) t[std::to_string(c.id)] = c.seconds;
    return json{{"seconds", t}};
}

/// One line per criterion: "[PASS] 3 total curvature".
inline std::string summary_line(const CriterionResult& c) {
    std::string s = (c.pass() ? "[PASS] " : "[FAIL] ") + std::to_string(c.id) + " " + c.title;
    if (!c.pass()) {
        int bad = 0;
        for (const auto& k : c.checks.checks) bad += k.pass ? 0 : 1;
        s += " (" + std::to_string(bad) + " of " + std::to_string(c.checks.checks.size()) + " checks failed)";
    }
    return s;
}

namespace acceptance {

inline constexpr double pi = std::numbers::pi;

// ------------------------------------------------------------------ 1

inline CriterionResult constants() {
    CriterionResult r{1, "constants", {"constants", {}}};
    auto near = [&](const std::string& name, double got, double want, double tol) {
        r.checks.add_leq(name, std::fabs(got - want), tol);
    };
    near("C_hat(1,0) = 4 sqrt3 + 11 pi/2", chord_arc(1, 0).C_hat, 4 * std::sqrt(3.0) + 11 * pi / 2, 1e-12);
    double worst = 0;
    for (int I0 = 0; I0 <= 20; ++I0) {
        const double want = chord_arc(I0 + 1, 0).C_hat / 2;
        worst = std::max(worst, std::fabs(a_of_I0(I0) - want) / std::max(1.0, std::fabs(want)));
    }
    r.checks.add_leq("a(I0) = C_hat(I0+1,0)/2, I0 = 0..20", worst, 1e-12);
    near("Scherk extremal product = 2 pi", scherk_extremal(pi / 2).value.value, 2 * pi, 1e-12);
    near("helicoid extremal product = pi/sqrt2", helicoid_extremal().value.value, pi / std::sqrt(2.0), 1e-12);
    return r;
}

// ------------------------------------------------------------------ 2

struct IndexJob {
    std::string label;
    WeierstrassData data;
    ParamDomain domain;
    bool one_sided = false;
    SpectralResult result;
};

inline CriterionResult spectral_indices(int threads) {
    CriterionResult r{2, "spectral indices", {"spectral_indices", {}}};
    std::vector<IndexJob> jobs;
    const auto plane = classical_surface(Family::plane);
    const auto cat = classical_surface(Family::catenoid);
    const auto enn = classical_surface(Family::enneper);
    const auto sch = classical_surface(Family::scherk_doubly_periodic);
    for (int s : {8, 16, 32}) jobs.push_back({"plane", plane, {DomainShape::disk, {1.0}, {s, 6 * s}}});
    for (int s : {24, 48, 96})
        jobs.push_back({"catenoid", cat, {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {s, s}}});
    for (int s : {15, 30, 60}) jobs.push_back({"enneper", enn, {DomainShape::disk, {3.0}, {s, 6 * s}}});
    jobs.push_back({"scherk", sch, sch.domain, true});
    parallel_for(static_cast<int>(jobs.size()), [&](int i) {
        auto& j = jobs[static_cast<size_t>(i)];
        const SurfaceMesh m = build_mesh(j.data, j.domain);
        j.result = j.one_sided ? morse_index_one_sided(m) : morse_index(m);
    }, threads);
    json rows = json::array();
    for (const auto& j : jobs) {
        rows.push_back(json{{"surface", j.label}, {"resolution", j.domain.resolution}, {"one_sided", j.one_sided},
                            {"index", j.result.index}, {"inertia_index", j.result.inertia_index},
                            {"eigenvalues", j.result.eigenvalues}});
        r.checks.add_flag(j.label + " " + std::to_string(j.domain.resolution[0]) + ": Lanczos count = inertia count",
                          j.result.index == j.result.inertia_index && !j.result.saturated);
    }
    r.details["runs"] = rows;
    auto idx = [&](size_t k) { return jobs[k].result.index; };
    for (size_t k = 0; k < 3; ++k) r.checks.add_flag("flat disk index 0 at resolution " + std::to_string(k), idx(k) == 0);
    r.checks.add_flag("catenoid index stable at 1 on the two finest", idx(4) == 1 && idx(5) == 1);
    r.checks.add_flag("Enneper index stable at 1 on the two finest", idx(7) == 1 && idx(8) == 1);
    r.checks.add_flag("Scherk anti-invariant index 0", idx(9) == 0);
    return r;
}

// ------------------------------------------------------------------ 3

inline CriterionResult total_curvature_check() {
    CriterionResult r{3, "total curvature", {"total_curvature", {}}};
    const SurfaceMesh cat = build_mesh(classical_surface(Family::catenoid),
                                       {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {64, 64}});
    const SurfaceMesh enn = build_mesh(classical_surface(Family::enneper), {DomainShape::disk, {14.0, 3.0}, {60, 360}});
    const SurfaceMesh sch = fundamental_domain(build_mesh(classical_surface(Family::scherk_doubly_periodic)));
    const double tc = total_curvature(cat), te = total_curvature(enn), ts = total_curvature(sch);
    r.checks.add_leq("catenoid |int K + 4pi| / 4pi", std::fabs(tc + 4 * pi) / (4 * pi), 0.01);
    r.checks.add_leq("Enneper |int K + 4pi| / 4pi", std::fabs(te + 4 * pi) / (4 * pi), 0.01);
    r.checks.add_leq("Scherk quotient |int K + 2pi| / 2pi", std::fabs(ts + 2 * pi) / (2 * pi), 0.02);
    r.checks.add_leq("catenoid Jorge-Meeks residual", std::fabs(jorge_meeks_residual(catenoid_profile(), tc)), 0.05);
    r.checks.add_leq("Enneper Jorge-Meeks residual", std::fabs(jorge_meeks_residual(enneper_profile(), te)), 0.05);
    // projective plane minus two points, annular ends
    r.checks.add_leq("Scherk quotient Jorge-Meeks residual", std::fabs(jorge_meeks_residual_annular(-1, ts)), 0.05);
    r.details = json{{"catenoid", tc}, {"enneper", te}, {"scherk_quotient", ts}, {"rule", kTotalCurvatureRule}};
    return r;
}

// ------------------------------------------------------------------ 4

inline CriterionResult index_bounds() {
    CriterionResult r{4, "index bounds", {"index_bounds", {}}};
    r.checks.add_flag("CM bound = 1 for the catenoid", cm_index_lower_bound(catenoid_profile()).bound == 1);
    r.checks.add_flag("CM bound = 1 for Enneper", cm_index_lower_bound(enneper_profile()).bound == 1);
    const auto c = profile_census(3, 4, 4, 3);
    r.checks.add_leq("census inconsistencies", static_cast<double>(c.inconsistencies()), 0);
    r.details = json{{"profiles", c.profiles}, {"unified_exceeds_split", c.unified_exceeds_split},
                     {"negative_bound", c.negative_bound}};
    return r;
}

// ------------------------------------------------------------------ 5

struct FuzzTally {
    long hierarchies = 0;
    long invalid = 0;
    std::map<std::string, long> failed;       // check name -> count
    std::map<std::string, std::uint64_t> first_seed;

    void fail(const std::string& name, std::uint64_t seed) {
        if (failed[name]++ == 0) first_seed[name] = seed;
    }
};

inline FuzzTally fuzz_hierarchies(std::uint64_t seed0, int count, int threads, HierarchyCaps caps = {}) {
    std::vector<FuzzTally> part(static_cast<size_t>(std::max(1, threads)));
    const int chunks = static_cast<int>(part.size());
    parallel_for(chunks, [&](int c) {
        auto& t = part[static_cast<size_t>(c)];
        for (int i = c; i < count; i += chunks) {
            const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
            const Hierarchy h = random_hierarchy(seed, caps);
            ++t.hierarchies;
            if (!validate(h).empty()) { ++t.invalid; t.fail("validate", seed); }
            const auto mi = main_inequality(h);
            for (const auto& k : mi.checks)
                if (!k.pass) t.fail(k.name, seed);
            const auto pl = per_level_bounds(h);
            for (const auto& k : pl.checks)
                if (!k.pass) t.fail("per-level " + k.name.substr(k.name.find(": ") + 2), seed);
        }
    }, threads);
    FuzzTally all;
    for (const auto& t : part) {
        all.hierarchies += t.hierarchies;
        all.invalid += t.invalid;
        for (const auto& [k, v] : t.failed) {
            const auto s = t.first_seed.at(k);
            if (!all.failed.count(k) || s < all.first_seed[k]) all.first_seed[k] = s;
            all.failed[k] += v;
        }
    }
    return all;
}

inline CriterionResult hierarchy_arithmetic(const AcceptanceConfig& cfg) {
    CriterionResult r{5, "hierarchy arithmetic", {"hierarchy_arithmetic", {}}};
    bool trivial_ok = true;
    for (int I = 1; I <= 12; ++I)
        for (bool o : {true, false}) {
            const Hierarchy h = trivial_hierarchy(minimal_node(o, 0, 1, 3, I));
            trivial_ok = trivial_ok && correction_term(stats(h), Variant::general) == 3 * I - 3;
        }
    r.checks.add_flag("trivial hierarchies: C(H) = 3I - 3", trivial_ok);

    const FuzzTally t = fuzz_hierarchies(cfg.seed, cfg.fuzz_count, cfg.threads);
    r.checks.add_geq("random hierarchies generated", static_cast<double>(t.hierarchies), cfg.fuzz_count);
    r.checks.add_leq("hierarchies failing validate", static_cast<double>(t.invalid), 0);
    long main_fail = 0, level_fail = 0;
    json failures = json::object();
    for (const auto& [k, v] : t.failed) {
        failures[k] = json{{"count", v}, {"first_seed", t.first_seed.at(k)}};
        if (k.rfind("per-level ", 0) == 0) level_fail += v;
        else if (k != "validate") main_fail += v;
    }
    r.checks.add_leq("main inequality and corollary check failures", static_cast<double>(main_fail), 0,
                     main_fail ? "see details.failures" : "");
    r.checks.add_leq("per-level bound failures", static_cast<double>(level_fail), 0);
    r.details["failures"] = failures;

    // I = 1: admitted (e, S) from the general rules alone, without the classification flags
    std::set<std::pair<int, int>> admitted;
    for (bool o : {true, false})
        for (int g = 0; g <= 3; ++g)
            for (int e = 1; e <= 6; ++e)
                for (int S = 1; S <= 10; ++S) {
                    const DeltaNode n = minimal_node(o, g, e, S, 1);
                    const Hierarchy h = trivial_hierarchy(n);
                    if (!validate(h).empty() || !main_inequality(h).pass()) continue;
                    bool ok = true;
                    for (const auto& k : delta_complexity_bounds(n).checks)
                        if (k.name.rfind("I=1", 0) != 0) ok = ok && k.pass;
                    if (ok) admitted.insert({e, S});
                }
    json adm = json::array();
    for (const auto& [e, S] : admitted) adm.push_back({e, S});
    r.details["I1_admitted"] = adm;
    r.checks.add_flag("I = 1 admits exactly (e,S) in {(2,2),(1,3)}",
                      admitted == std::set<std::pair<int, int>>{{1, 3}, {2, 2}});
    return r;
}

// ------------------------------------------------------------------ 6

inline CriterionResult incidence_oracle() {
    CriterionResult r{6, "incidence oracle", {"incidence_oracle", {}}};
    const auto c = enumerate_incidence_structures(5, 5, 8);
    r.checks.add_geq("structures enumerated", static_cast<double>(c.structures), 1);
    r.checks.add_leq("violations", static_cast<double>(c.violations), 0);
    r.checks.add_leq("equality cases off the chain characterization", static_cast<double>(c.equality_mismatches), 0);
    r.checks.add_leq("annotated violations", static_cast<double>(c.annotated_violations), 0);
    r.details = to_json(c);
    return r;
}

// ------------------------------------------------------------------ 7

inline CriterionResult multigraph_numerics() {
    CriterionResult r{7, "multi-graph numerics", {"multigraph_numerics", {}}};
    const double tau = pi / 10, alpha = 0.05;

    const SurfaceMesh flat = build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {32, 192}});
    const auto fc = check_conclusions(flat, 1, 0.3, 0.8, tau, alpha);
    const auto fk = boundary_geodesic_curvature(flat, 0.6);
    r.checks.add_leq("flat C1 residual", fc.residuals.at("C1_length_residual"), 1e-3);
    r.checks.add_leq("flat C3 residual", fc.residuals.at("C3_area_residual"), 1e-3);
    r.checks.add_leq("flat |kappa - 2pi|", std::fabs(fk.kappa - 2 * pi), 1e-3);

    const double L0 = 2 * pi + 1;
    const SurfaceMesh cat = build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {1.0, std::exp(6.5)}, {80, 64}});
    const auto ch = check_hypotheses(cat, 100, 200, alpha, L0);
    for (const char* k : {"B1", "B2", "B3"}) r.checks.add_flag(std::string("catenoid ") + k, ch.flags.at(k));
    const int cm = multiplicity(cat, ch.plane_normals.front(), 150, L0);
    const auto ck = boundary_geodesic_curvature(cat, 150);
    r.checks.add_flag("catenoid m = 1", cm == 1);
    r.checks.add_leq("catenoid |kappa - 2pi|", std::fabs(ck.kappa - 2 * pi), tau);
    const auto cc = check_conclusions(cat, cm, 100, 200, tau, alpha);

    const SurfaceMesh enn = build_mesh(classical_surface(Family::enneper), {DomainShape::disk, {20.0, 3.0}, {60, 360}});
    const auto ek = boundary_geodesic_curvature(enn, 2400);
    r.checks.add_flag("Enneper m = 3", ek.m == 3);
    r.checks.add_leq("Enneper |kappa - 6pi|", std::fabs(ek.kappa - 6 * pi), tau / 3);

    r.details = json{{"flat", to_json(fc)}, {"flat_kappa", fk.kappa}, {"catenoid_hypotheses", to_json(ch)},
                     {"catenoid_conclusions", to_json(cc)}, {"catenoid_kappa", ck.kappa},
                     {"enneper_kappa", ek.kappa}, {"enneper_m", ek.m}};
    return r;
}

// ------------------------------------------------------------------ 8

inline int nearest_vertex(const SurfaceMesh& m, const Vec3& p) {
    int best = 0;
    for (int v = 1; v < m.n_vertices(); ++v)
        if ((m.vertices[static_cast<size_t>(v)] - p).squaredNorm() < (m.vertices[static_cast<size_t>(best)] - p).squaredNorm()) best = v;
    return best;
}

inline CriterionResult monotonicity_area() {
    CriterionResult r{8, "monotonicity and area", {"monotonicity_area", {}}};
    json rows = json::array();

    const SurfaceMesh disk = build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {96, 576}});
    double worst = 0;
    for (double rad : {0.2, 0.4, 0.6, 0.8}) {
        const double a = mesh_area(geodesic_ball(disk, 0, rad));
        worst = std::max(worst, std::fabs(a / area_lower_bound(rad, 2, 0, 0) - 1));
        rows.push_back(json{{"surface", "plane"}, {"r", rad}, {"area", a}});
    }
    r.checks.add_leq("flat disk |area / bound - 1|", worst, 0.02);

    // area >= 3 r^2 for r up to min(r2, distance to the boundary)
    const double r2 = 1.0;
    struct Case { std::string name; SurfaceMesh m; Vec3 center; };
    std::vector<Case> cases;
    cases.push_back({"plane", disk, Vec3::Zero()});
    cases.push_back({"catenoid", build_mesh(classical_surface(Family::catenoid)), Vec3(1, 0, 0)});
    cases.push_back({"enneper", build_mesh(classical_surface(Family::enneper)), Vec3::Zero()});
    cases.push_back({"helicoid", build_mesh(classical_surface(Family::helicoid)), Vec3(0, 0, -std::numbers::pi / 2)});
    cases.push_back({"scherk", build_mesh(classical_surface(Family::scherk_doubly_periodic)), Vec3::Zero()});
    bool yau_ok = true;
    for (const auto& c : cases) {
        const int p = nearest_vertex(c.m, c.center);
        const auto d = geodesic_distances(c.m, p);
        double reach = std::numeric_limits<double>::infinity();
        for (const auto& loop : c.m.boundary_loops)
            for (int v : loop) reach = std::min(reach, d[static_cast<size_t>(v)]);
        const double rmax = std::min(r2, reach);
        for (double f : {0.25, 0.5, 0.75, 1.0}) {
            const double rad = f * rmax;
            const double a = mesh_area(clip_by_values(c.m, d, -std::numeric_limits<double>::infinity(), rad));
            const auto rep = yau_area_check(a, rad, r2, reach);
            yau_ok = yau_ok && rep.pass();
            rows.push_back(json{{"surface", c.name}, {"r", rad}, {"area", a}, {"three_r2", 3 * rad * rad}});
        }
    }
    r.checks.add_flag("area >= 3 r^2 on every generated mesh", yau_ok);

    const SurfaceMesh cat = build_mesh(classical_surface(Family::catenoid),
                                       {DomainShape::annulus, {std::exp(-4.5), std::exp(4.5)}, {90, 64}});
    const double rF = 20;
    const SurfaceMesh piece = extrinsic_slab(cat, Vec3::Zero(), 0, rF);
    const auto dp = delta_piece_report(piece, {1, 1}, rF, rF, pi / 10);
    const double mk = -total_curvature(piece);
    r.checks.add_flag("catenoid piece: -int K > 3 pi", mk > 3 * pi);
    r.checks.add_leq("catenoid piece: |-int K / 4pi - 1|", std::fabs(mk / (4 * pi) - 1), 0.02);
    r.details = json{{"balls", rows}, {"delta_piece", to_json(dp)}};
    return r;
}

} // namespace acceptance

/// Criteria 1-8, in order.
inline AcceptanceReport run_criteria(const AcceptanceConfig& cfg,
                                     const std::function<void(const CriterionResult&)>& on_result = {}) {
    using namespace acceptance;
    std::vector<std::function<CriterionResult()>> jobs{
        [] { return constants(); },
        [&] { return spectral_indices(cfg.threads); },
        [] { return total_curvature_check(); },
        [] { return index_bounds(); },
        [&] { return hierarchy_arithmetic(cfg); },
        [] { return incidence_oracle(); },
        [] { return multigraph_numerics(); },
        [] { return monotonicity_area(); },
    };
    AcceptanceReport rep;
    rep.config = cfg;
    for (auto& j : jobs) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult c = j();
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(c);
        rep.criteria.push_back(std::move(c));
    }
    return rep;
}

/// Full suite: criteria 1-8, then a second run compared byte for byte (criterion 9).
inline AcceptanceReport run_acceptance(const AcceptanceConfig& cfg,
                                       const std::function<void(const CriterionResult&)>& on_result = {}) {
    AcceptanceReport rep = run_criteria(cfg, on_result);
    const auto t0 = std::chrono::steady_clock::now();
    const std::string first = dump_json(to_json(rep));
    const std::string second = dump_json(to_json(run_criteria(cfg)));
    CriterionResult det{9, "determinism", {"determinism", {}}};
    det.checks.add_flag("repeated run gives a byte-identical report", first == second);
    det.details = json{{"bytes", first.size()}};
    det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(det);
    rep.criteria.push_back(std::move(det));
    return rep;
}

} // namespace cmc
