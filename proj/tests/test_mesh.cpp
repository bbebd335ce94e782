#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "cmc/mesh.hpp"

using namespace cmc;
constexpr double pi = std::numbers::pi;

namespace {

int euler_characteristic(const SurfaceMesh& m) {
    std::set<std::pair<int, int>> edges;
    for (const auto& T : m.triangles)
        for (int k = 0; k < 3; ++k) edges.insert(std::minmax(T[k], T[(k + 1) % 3]));
    return m.n_vertices() - static_cast<int>(edges.size()) + m.n_triangles();
}

SurfaceMesh flat_disk(int rings, int nmax) {
    return build_mesh(classical_surface(Family::plane), {DomainShape::disk, {1.0}, {rings, nmax}});
}

double max_distance_error(const SurfaceMesh& m, double below) {
    const auto d = geodesic_distances(m, 0);
    double err = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        const double r = m.vertices[static_cast<size_t>(v)].norm();
        if (r < below) err = std::max(err, std::fabs(d[static_cast<size_t>(v)] - r));
    }
    return err;
}

} // namespace

TEST(Mesh, Topology) {
    EXPECT_EQ(euler_characteristic(flat_disk(8, 48)), 1);
    EXPECT_EQ(euler_characteristic(build_mesh(classical_surface(Family::catenoid))), 0);
    EXPECT_EQ(euler_characteristic(build_mesh(classical_surface(Family::enneper))), 1);
    EXPECT_EQ(euler_characteristic(build_mesh(classical_surface(Family::helicoid))), 1);
    EXPECT_EQ(build_mesh(classical_surface(Family::catenoid)).boundary_loops.size(), 2u);
    EXPECT_EQ(flat_disk(8, 48).boundary_loops.size(), 1u);
}

TEST(Mesh, GeneratedMeshesAreClean) {
    for (auto f : {Family::plane, Family::catenoid, Family::enneper, Family::helicoid, Family::scherk_doubly_periodic}) {
        const auto m = build_mesh(classical_surface(f));
        EXPECT_TRUE(mesh_issues(m).empty()) << to_string(f);
        EXPECT_GT(mesh_area(m), 0) << to_string(f);
    }
}

TEST(Mesh, FlatDiskAreaConverges) {
    const double a1 = std::fabs(mesh_area(flat_disk(16, 96)) - pi);
    const double a2 = std::fabs(mesh_area(flat_disk(32, 192)) - pi);
    EXPECT_LT(a2, a1);
    EXPECT_LT(a2 / pi, 1e-3);
}

TEST(Mesh, CatenoidAreaMatchesClosedForm) {
    // area of the catenoid between heights -h and h: pi (2h + sinh 2h)
    const double h = 1.5;
    const auto m = build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {std::exp(-h), std::exp(h)}, {60, 96}});
    EXPECT_NEAR(mesh_area(m) / (pi * (2 * h + std::sinh(2 * h))), 1.0, 2e-3);
}

TEST(Mesh, ScalingActsOnAreaAndCurvature) {
    const auto m = build_mesh(classical_surface(Family::enneper));
    for (double lam : {0.5, 3.0}) {
        const auto s = scaled(m, lam);
        EXPECT_NEAR(mesh_area(s), lam * lam * mesh_area(m), 1e-10 * mesh_area(s));
        EXPECT_NEAR(s.K[5], m.K[5] / (lam * lam), 1e-12);
        EXPECT_NEAR(total_curvature(s), total_curvature(m), 1e-9);
    }
}

TEST(Mesh, FastMarchingOnFlatDisk) {
    const auto m = flat_disk(48, 288);
    const auto d = geodesic_distances(m, 0);
    for (int v = 0; v < m.n_vertices(); ++v) EXPECT_GE(d[static_cast<size_t>(v)], m.vertices[static_cast<size_t>(v)].norm() - 1e-12);
    EXPECT_LT(max_distance_error(m, 0.9), 0.01);
    const auto dj = geodesic_distances(m, 0, DistanceMethod::dijkstra);
    double fm = 0, dk = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        fm += d[static_cast<size_t>(v)] - m.vertices[static_cast<size_t>(v)].norm();
        dk += dj[static_cast<size_t>(v)] - m.vertices[static_cast<size_t>(v)].norm();
    }
    EXPECT_LT(fm, dk);
}

TEST(Mesh, FastMarchingConvergesUnderRefinement) {
    const double e1 = max_distance_error(flat_disk(24, 144), 0.9);
    const double e2 = max_distance_error(flat_disk(48, 288), 0.9);
    const double e3 = max_distance_error(flat_disk(96, 576), 0.9);
    EXPECT_LT(e2, e1);
    EXPECT_LT(e3, e2);
}

TEST(Mesh, FastMarchingOnCatenoidMeridian) {
    // along a meridian from the neck the distance is the arclength sinh(x3)
    const auto m = build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {std::exp(-2.0), std::exp(2.0)}, {81, 96}});
    int src = 0;
    for (int v = 0; v < m.n_vertices(); ++v)
        if ((m.vertices[static_cast<size_t>(v)] - Vec3(-1, 0, 0)).norm() < (m.vertices[static_cast<size_t>(src)] - Vec3(-1, 0, 0)).norm()) src = v;
    const auto d = geodesic_distances(m, src);
    for (int v = 0; v < m.n_vertices(); ++v) {
        const Vec3& x = m.vertices[static_cast<size_t>(v)];
        if (std::fabs(std::atan2(x.y(), x.x()) - std::atan2(m.vertices[static_cast<size_t>(src)].y(), m.vertices[static_cast<size_t>(src)].x())) < 1e-9 &&
            std::fabs(x.z()) < 1.5)
            EXPECT_NEAR(d[static_cast<size_t>(v)], std::fabs(std::sinh(x.z())), 0.02 + 0.01 * std::fabs(std::sinh(x.z())));
    }
}

TEST(Mesh, BallsAreNestedAndAreaIsMonotone) {
    const auto m = build_mesh(classical_surface(Family::enneper));
    double prev = 0;
    std::set<int> prev_set;
    for (double r : {0.2, 0.4, 0.8, 1.2}) {
        const auto b = geodesic_ball(m, 0, r);
        const auto s = ball_vertex_set(b);
        EXPECT_TRUE(std::includes(s.begin(), s.end(), prev_set.begin(), prev_set.end()));
        EXPECT_GT(mesh_area(b), prev);
        prev = mesh_area(b);
        prev_set = s;
    }
    EXPECT_THROW(geodesic_ball(m, 0, 0.0), std::invalid_argument);
}

TEST(Mesh, ClipIsExactForLinearValues) {
    // x <= 1/2 on the unit disk removes a circular segment of area acos(1/2) - sqrt(3)/4
    const auto m = flat_disk(64, 384);
    std::vector<double> x(m.vertices.size());
    for (size_t v = 0; v < x.size(); ++v) x[v] = m.vertices[v].x();
    const auto c = clip_by_values(m, x, -10.0, 0.5);
    const double segment = std::acos(0.5) - std::sqrt(3.0) / 4;
    EXPECT_NEAR(mesh_area(c), mesh_area(m) - segment, 2e-3);
    for (const auto& v : c.vertices) EXPECT_LE(v.x(), 0.5 + 1e-12);
}

TEST(Mesh, SlabsAndComponents) {
    const auto m = build_mesh(classical_surface(Family::catenoid), {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {60, 64}});
    const auto slab = extrinsic_slab(m, Vec3::Zero(), 3.0, 6.0);
    EXPECT_EQ(connected_components(slab).size(), 2u);  // the two ends
    // cut points lie on edge chords, so |x| may sag below the inner radius by O(h^2)
    for (int v = 0; v < slab.n_vertices(); ++v) {
        const double r = slab.vertices[static_cast<size_t>(v)].norm();
        const double tol = slab.vertex_origin[static_cast<size_t>(v)] >= 0 ? 1e-9 : 3e-3;
        EXPECT_GE(r, 3.0 * (1 - tol));
        EXPECT_LE(r, 6.0 * (1 + tol));
    }
    EXPECT_THROW(extrinsic_slab(m, Vec3::Zero(), 2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(extrinsic_slab(build_mesh(classical_surface(Family::scherk_doubly_periodic)), Vec3::Zero(), 0.1, 0.2),
                 std::invalid_argument);
}

TEST(Mesh, ScherkFundamentalDomainHalvesTheSurface) {
    const auto m = build_mesh(classical_surface(Family::scherk_doubly_periodic));
    ASSERT_TRUE(m.involution.has_value());
    const auto f = fundamental_domain(m);
    EXPECT_NEAR(mesh_area(f) / mesh_area(m), 0.5, 0.02);
    for (int v = 0; v < m.n_vertices(); ++v) EXPECT_EQ((*m.involution)[static_cast<size_t>((*m.involution)[static_cast<size_t>(v)])], v);
}

TEST(Mesh, JsonRoundTrip) {
    const auto m = build_mesh(classical_surface(Family::helicoid));
    const auto back = mesh_from_json(json::parse(to_json(m).dump()));
    EXPECT_EQ(back.n_vertices(), m.n_vertices());
    EXPECT_EQ(back.triangles, m.triangles);
    EXPECT_DOUBLE_EQ(mesh_area(back), mesh_area(m));
    EXPECT_DOUBLE_EQ(total_curvature(back), total_curvature(m));
}
