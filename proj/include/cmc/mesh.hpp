#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cmc/report.hpp"
#include "cmc/weierstrass.hpp"

namespace cmc {

using Tri = std::array<int, 3>;

struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;
    std::vector<cplx> param_coords;
    std::vector<Vec3> normal;
    std::vector<double> K;
    std::vector<double> normA2;
    std::vector<std::vector<int>> boundary_loops;
    std::optional<std::vector<int>> involution;
    std::vector<Vec3> periods;          // reduced lattice basis; positions are taken modulo it
    std::vector<int> vertex_origin;     // for submeshes: source vertex, or -1 for a cut point
    bool minimal = true;
    json meta = json::object();

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
};

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------ geometry helpers

/// Shortest representative of d modulo the (horizontal) period lattice.
inline Vec3 min_image(const std::vector<Vec3>& periods, const Vec3& d) {
    if (periods.size() != 2) return d;
    const Vec3& a = periods[0];
    const Vec3& b = periods[1];
    Eigen::Matrix2d G;
    G << a.x(), b.x(), a.y(), b.y();
    const Eigen::Vector2d c = G.fullPivLu().solve(Eigen::Vector2d(d.x(), d.y()));
    const double ca = std::round(c(0)), cb = std::round(c(1));
    Vec3 best = d - ca * a - cb * b;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
            Vec3 v = d - (ca + i) * a - (cb + j) * b;
            if (v.squaredNorm() < best.squaredNorm()) best = v;
        }
    return best;
}

inline Vec3 edge_vec(const SurfaceMesh& m, int i, int j) {
    return min_image(m.periods, m.vertices[static_cast<size_t>(j)] - m.vertices[static_cast<size_t>(i)]);
}

inline double triangle_area(const SurfaceMesh& m, int t) {
    const Tri& T = m.triangles[static_cast<size_t>(t)];
    return 0.5 * edge_vec(m, T[0], T[1]).cross(edge_vec(m, T[0], T[2])).norm();
}

inline double mesh_area(const SurfaceMesh& m) {
    double a = 0;
    for (int t = 0; t < m.n_triangles(); ++t) a += triangle_area(m, t);
    return a;
}

inline double median_edge_length(const SurfaceMesh& m) {
    std::vector<double> l;
    l.reserve(m.triangles.size() * 3);
    for (const auto& T : m.triangles)
        for (int k = 0; k < 3; ++k)
            if (T[k] < T[(k + 1) % 3]) l.push_back(edge_vec(m, T[k], T[(k + 1) % 3]).norm());
    if (l.empty()) return 0.0;
    std::nth_element(l.begin(), l.begin() + static_cast<long>(l.size() / 2), l.end());
    return l[l.size() / 2];
}

/// Vertex to incident-triangle lists.
inline std::vector<std::vector<int>> vertex_triangles(const SurfaceMesh& m) {
    std::vector<std::vector<int>> vt(m.vertices.size());
    for (int t = 0; t < m.n_triangles(); ++t)
        for (int v : m.triangles[static_cast<size_t>(t)]) vt[static_cast<size_t>(v)].push_back(t);
    return vt;
}

/// Boundary edges (oriented as in their triangle) linked into closed loops.
inline std::vector<std::vector<int>> compute_boundary_loops(const std::vector<Tri>& tris) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& T : tris)
        for (int k = 0; k < 3; ++k) {
            int a = T[k], b = T[(k + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::multimap<int, int> next;
    for (const auto& T : tris)
        for (int k = 0; k < 3; ++k) {
            int a = T[k], b = T[(k + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1) next.emplace(a, b);
        }
    std::vector<std::vector<int>> loops;
    while (!next.empty()) {
        auto it = next.begin();
        const int start = it->first;
        std::vector<int> loop{start};
        int cur = it->second;
        next.erase(it);
        while (cur != start) {
            loop.push_back(cur);
            auto jt = next.find(cur);
            if (jt == next.end()) break;  // open chain (non-manifold); keep what we have
            cur = jt->second;
            next.erase(jt);
        }
        loops.push_back(loop);
    }
    std::sort(loops.begin(), loops.end(), [](const auto& a, const auto& b) {
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    return loops;
}

inline std::vector<char> boundary_mask(const SurfaceMesh& m) {
    std::vector<char> b(m.vertices.size(), 0);
    for (const auto& loop : m.boundary_loops)
        for (int v : loop) b[static_cast<size_t>(v)] = 1;
    return b;
}

// ------------------------------------------------------------------ construction

namespace detail {

inline void push_point(SurfaceMesh& m, const WeierstrassData& d, cplx z, bool w_chart = false, cplx z_store = {}) {
    const SurfacePoint p = evaluate(d, z, w_chart);
    m.vertices.push_back(p.X);
    m.normal.push_back(p.N.normalized());
    m.K.push_back(p.K);
    m.normA2.push_back(p.normA2);
    m.param_coords.push_back(w_chart ? z_store : z);
}

inline void quad(std::vector<Tri>& tris, int a, int b, int c, int d, bool flip) {
    // a-b-c-d counter-clockwise
    if (!flip) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
    } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
    }
}

inline double ring_radius(const ParamDomain& dom, int k) {
    const double R = dom.bounds[0];
    const double n = dom.resolution[0];
    const double gamma = dom.bounds.size() > 1 ? dom.bounds[1] : 0.0;
    if (gamma <= 0) return R * k / n;
    return R * std::sinh(gamma * k / n) / std::sinh(gamma);
}

inline void build_disk(SurfaceMesh& m, const WeierstrassData& d, const ParamDomain& dom) {
    const int nr = dom.resolution[0];
    const int nmax = dom.resolution[1];
    push_point(m, d, 0.0);
    std::vector<int> start{0}, count{1};
    for (int k = 1; k <= nr; ++k) {
        const double r = ring_radius(dom, k);
        const double dr = r - ring_radius(dom, k - 1);
        const int c = std::clamp(static_cast<int>(std::lround(2 * std::numbers::pi * r / dr)), 6, std::max(6, nmax));
        start.push_back(m.n_vertices());
        count.push_back(c);
        for (int j = 0; j < c; ++j) push_point(m, d, std::polar(r, 2 * std::numbers::pi * j / c));
    }
    // zip consecutive rings by angle
    for (int k = 1; k <= nr; ++k) {
        const int ci = count[k - 1], co = count[k];
        const int si = start[k - 1], so = start[k];
        if (ci == 1) {
            for (int j = 0; j < co; ++j) m.triangles.push_back({si, so + j, so + (j + 1) % co});
            continue;
        }
        int i = 0, j = 0;
        while (i < ci || j < co) {
            const double ai = static_cast<double>(i + 1) / ci;
            const double ao = static_cast<double>(j + 1) / co;
            if (j < co && (i >= ci || ao <= ai)) {
                m.triangles.push_back({si + i % ci, so + j, so + (j + 1) % co});
                ++j;
            } else {
                m.triangles.push_back({si + i % ci, so + (j % co), si + (i + 1) % ci});
                ++i;
            }
        }
    }
}

inline void build_annulus(SurfaceMesh& m, const WeierstrassData& d, const ParamDomain& dom) {
    const int nr = dom.resolution[0], na = dom.resolution[1];
    const double l0 = std::log(dom.bounds[0]), l1 = std::log(dom.bounds[1]);
    for (int i = 0; i < nr; ++i) {
        const double r = std::exp(l0 + (l1 - l0) * i / (nr - 1));
        for (int j = 0; j < na; ++j) push_point(m, d, std::polar(r, 2 * std::numbers::pi * j / na));
    }
    auto id = [&](int i, int j) { return i * na + ((j % na) + na) % na; };
    for (int i = 0; i + 1 < nr; ++i)
        for (int j = 0; j < na; ++j) quad(m.triangles, id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j), (i + j) % 2 == 1);
}

inline void build_rectangle(SurfaceMesh& m, const WeierstrassData& d, const ParamDomain& dom) {
    const int nu = dom.resolution[0], nv = dom.resolution[1];
    const auto& b = dom.bounds;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            push_point(m, d, cplx(b[0] + (b[1] - b[0]) * i / (nu - 1), b[2] + (b[3] - b[2]) * j / (nv - 1)));
    auto id = [&](int i, int j) { return i * nv + j; };
    for (int i = 0; i + 1 < nu; ++i)
        for (int j = 0; j + 1 < nv; ++j) quad(m.triangles, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), (i + j) % 2 == 1);
}

/// Fixed generic rotation of the octahedral grid so no node sits exactly at z = infinity.
inline Eigen::Matrix3d sphere_grid_rotation() {
    return Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix();
}

inline void build_sphere(SurfaceMesh& m, const WeierstrassData& d, const ParamDomain& dom) {
    if (d.family != Family::scherk_doubly_periodic) throw std::invalid_argument("sphere domain is only defined for scherk");
    const int n = dom.resolution[0];
    const double rho = dom.bounds[0];
    const Eigen::Matrix3d Rot = sphere_grid_rotation();
    std::vector<Vec3> pole_pts;
    for (cplx p : poles(d)) pole_pts.push_back(gauss_normal(p));

    std::map<std::array<int, 3>, int> index;
    std::vector<std::array<int, 3>> keys;
    std::vector<Vec3> pts;
    auto node = [&](int a, int b, int c) {
        std::array<int, 3> key{a, b, c};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(keys.size());
        index.emplace(key, id);
        keys.push_back(key);
        pts.push_back(Rot * Vec3(a, b, c).normalized());
        return id;
    };
    std::vector<Tri> tris;
    for (int sx : {1, -1})
        for (int sy : {1, -1})
            for (int sz : {1, -1}) {
                auto P = [&](int i, int j) { return node(sx * i, sy * j, sz * (n - i - j)); };
                const bool flip = sx * sy * sz < 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; i + j < n; ++j) {
                        Tri t1{P(i, j), P(i + 1, j), P(i, j + 1)};
                        if (flip) std::swap(t1[1], t1[2]);
                        tris.push_back(t1);
                        if (i + j + 2 <= n) {
                            Tri t2{P(i + 1, j), P(i + 1, j + 1), P(i, j + 1)};
                            if (flip) std::swap(t2[1], t2[2]);
                            tris.push_back(t2);
                        }
                    }
            }
    // drop pole neighbourhoods
    std::vector<int> remap(pts.size(), -1);
    std::vector<int> kept;
    for (size_t v = 0; v < pts.size(); ++v) {
        bool near = false;
        for (const auto& q : pole_pts) near = near || (pts[v] - q).norm() < rho;
        if (!near) {
            remap[v] = static_cast<int>(kept.size());
            kept.push_back(static_cast<int>(v));
        }
    }
    for (int v : kept) {
        const Vec3 N = pts[static_cast<size_t>(v)];
        if (N.z() > 0) {
            const cplx w(N.x() / (1 + N.z()), -N.y() / (1 + N.z()));
            push_point(m, d, w, true, 1.0 / w);
        } else {
            push_point(m, d, cplx(N.x() / (1 - N.z()), N.y() / (1 - N.z())));
        }
    }
    for (const auto& T : tris) {
        if (remap[T[0]] < 0 || remap[T[1]] < 0 || remap[T[2]] < 0) continue;
        Tri t{remap[T[0]], remap[T[1]], remap[T[2]]};
        // outward on the Gauss sphere
        const Vec3 c = pts[T[0]] + pts[T[1]] + pts[T[2]];
        const Vec3 nrm = (pts[T[1]] - pts[T[0]]).cross(pts[T[2]] - pts[T[0]]);
        if (nrm.dot(c) < 0) std::swap(t[1], t[2]);
        m.triangles.push_back(t);
    }
    // antipodal involution z -> -1 / conj(z)
    std::vector<int> inv(kept.size());
    for (size_t k = 0; k < kept.size(); ++k) {
        const auto& key = keys[static_cast<size_t>(kept[k])];
        const int o = index.at({-key[0], -key[1], -key[2]});
        if (remap[static_cast<size_t>(o)] < 0) throw MeshError("sphere grid: excision is not antipodally symmetric");
        inv[k] = remap[static_cast<size_t>(o)];
    }
    m.involution = inv;
    // period lattice: Gauss-reduce the generators to a basis
    auto gens = scherk_period_generators(d.theta());
    Vec3 a = gens[0], b = gens[1];
    for (const auto& g : gens)
        if (std::fabs(a.x() * g.y() - a.y() * g.x()) > 1e-9 * a.norm() * g.norm()) { b = g; break; }
    for (int it = 0; it < 100; ++it) {
        if (b.squaredNorm() < a.squaredNorm()) std::swap(a, b);
        const double mu = std::round(a.dot(b) / a.squaredNorm());
        if (mu == 0) break;
        b -= mu * a;
    }
    m.periods = {a, b};
}

} // namespace detail

/// Triangulate the domain and evaluate positions, normals and curvature from closed forms.
inline SurfaceMesh build_mesh(const WeierstrassData& data, const ParamDomain& domain) {
    require_valid(domain);
    if (data.family == Family::scherk_doubly_periodic && domain.shape != DomainShape::sphere)
        throw std::invalid_argument("scherk meshes use the sphere domain");
    if (data.family != Family::scherk_doubly_periodic && domain.shape == DomainShape::sphere)
        throw std::invalid_argument("sphere domain is only defined for scherk");
    if ((data.family == Family::catenoid) && domain.shape != DomainShape::annulus)
        throw std::invalid_argument("catenoid meshes use an annulus (z = 0 is a pole)");
    SurfaceMesh m;
    switch (domain.shape) {
    case DomainShape::disk: detail::build_disk(m, data, domain); break;
    case DomainShape::annulus: detail::build_annulus(m, data, domain); break;
    case DomainShape::rectangle: detail::build_rectangle(m, data, domain); break;
    case DomainShape::sphere: detail::build_sphere(m, data, domain); break;
    }
    if (m.triangles.empty()) throw MeshError("resolution too coarse to triangulate");
    for (int t = 0; t < m.n_triangles(); ++t)
        if (!(triangle_area(m, t) > 0)) throw MeshError("degenerate triangle " + std::to_string(t));
    m.boundary_loops = compute_boundary_loops(m.triangles);
    m.minimal = data.minimal();
    json params = json::object();
    for (const auto& [k, v] : data.parameters) params[k] = v;
    m.meta = json{{"family", to_string(data.family)},
                  {"params", params},
                  {"domain", {{"shape", to_string(domain.shape)}, {"bounds", domain.bounds}}},
                  {"resolution", {domain.resolution[0], domain.resolution[1]}}};
    return m;
}

inline SurfaceMesh build_mesh(const WeierstrassData& data) { return build_mesh(data, data.domain); }

// ------------------------------------------------------------------ invariants

inline std::vector<std::string> mesh_issues(const SurfaceMesh& m) {
    std::vector<std::string> out;
    const size_t n = m.vertices.size();
    if (m.normal.size() != n || m.K.size() != n || m.normA2.size() != n) out.push_back("per-vertex field size mismatch");
    for (int t = 0; t < m.n_triangles(); ++t) {
        for (int v : m.triangles[static_cast<size_t>(t)])
            if (v < 0 || static_cast<size_t>(v) >= n) { out.push_back("triangle index out of range"); return out; }
        if (!(triangle_area(m, t) > 0)) { out.push_back("degenerate triangle " + std::to_string(t)); break; }
    }
    for (size_t v = 0; v < m.normal.size(); ++v)
        if (std::fabs(m.normal[v].norm() - 1.0) > 1e-12) { out.push_back("normal not unit at " + std::to_string(v)); break; }
    if (m.minimal)
        for (size_t v = 0; v < std::min(m.K.size(), m.normA2.size()); ++v)
            if (std::fabs(m.normA2[v] + 2 * m.K[v]) > 1e-10) { out.push_back("normA2 != -2K at " + std::to_string(v)); break; }
    // boundary loops must use exactly the boundary edges, each once
    std::map<std::pair<int, int>, int> count;
    for (const auto& T : m.triangles)
        for (int k = 0; k < 3; ++k) ++count[{std::min(T[k], T[(k + 1) % 3]), std::max(T[k], T[(k + 1) % 3])}];
    std::set<std::pair<int, int>> bnd, used;
    for (const auto& [e, c] : count)
        if (c == 1) bnd.insert(e);
    for (const auto& loop : m.boundary_loops)
        for (size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i], b = loop[(i + 1) % loop.size()];
            std::pair<int, int> e{std::min(a, b), std::max(a, b)};
            if (!used.insert(e).second) out.push_back("boundary edge used twice");
        }
    if (used != bnd) out.push_back("boundary loops do not partition the boundary edges");
    if (m.involution) {
        const auto& tau = *m.involution;
        if (tau.size() != n) out.push_back("involution size mismatch");
        else {
            for (size_t v = 0; v < n; ++v) {
                const int w = tau[v];
                if (w < 0 || static_cast<size_t>(w) >= n) { out.push_back("involution out of range"); break; }
                if (static_cast<size_t>(w) == v) { out.push_back("involution has a fixed point"); break; }
                if (tau[static_cast<size_t>(w)] != static_cast<int>(v)) { out.push_back("involution is not of order 2"); break; }
            }
            std::set<std::array<int, 3>> tri_set;
            for (auto T : m.triangles) {
                std::sort(T.begin(), T.end());
                tri_set.insert(T);
            }
            for (const auto& T : m.triangles) {
                std::array<int, 3> U{tau[T[0]], tau[T[1]], tau[T[2]]};
                std::sort(U.begin(), U.end());
                if (!tri_set.count(U)) { out.push_back("involution does not map triangles to triangles"); break; }
            }
        }
    }
    return out;
}

// ------------------------------------------------------------------ integrals

inline constexpr const char* kTotalCurvatureRule = "vertex average of K times triangle area";

inline double total_curvature(const SurfaceMesh& m) {
    if (m.triangles.empty()) throw MeshError("total_curvature: empty mesh");
    double s = 0;
    for (int t = 0; t < m.n_triangles(); ++t) {
        const Tri& T = m.triangles[static_cast<size_t>(t)];
        s += triangle_area(m, t) * (m.K[T[0]] + m.K[T[1]] + m.K[T[2]]) / 3.0;
    }
    return s;
}

// ------------------------------------------------------------------ submeshes

/// Keep the given triangles; vertices are compacted and boundary loops recomputed.
inline SurfaceMesh submesh(const SurfaceMesh& m, const std::vector<int>& tri_ids) {
    SurfaceMesh s;
    std::vector<int> remap(m.vertices.size(), -1);
    for (int t : tri_ids) {
        Tri T = m.triangles[static_cast<size_t>(t)];
        for (int& v : T) {
            if (remap[static_cast<size_t>(v)] < 0) {
                remap[static_cast<size_t>(v)] = s.n_vertices();
                s.vertices.push_back(m.vertices[static_cast<size_t>(v)]);
                s.normal.push_back(m.normal[static_cast<size_t>(v)]);
                s.K.push_back(m.K[static_cast<size_t>(v)]);
                s.normA2.push_back(m.normA2[static_cast<size_t>(v)]);
                if (!m.param_coords.empty()) s.param_coords.push_back(m.param_coords[static_cast<size_t>(v)]);
                s.vertex_origin.push_back(m.vertex_origin.empty() ? v : m.vertex_origin[static_cast<size_t>(v)]);
            }
            v = remap[static_cast<size_t>(v)];
        }
        s.triangles.push_back(T);
    }
    s.periods = m.periods;
    s.minimal = m.minimal;
    s.meta = m.meta;
    s.boundary_loops = compute_boundary_loops(s.triangles);
    return s;
}

/// Region lo <= f <= hi of a piecewise-linear vertex function, cut exactly along its level sets.
inline SurfaceMesh clip_by_values(const SurfaceMesh& m, const std::vector<double>& f, double lo, double hi) {
    if (f.size() != m.vertices.size()) throw std::invalid_argument("clip: value count mismatch");
    SurfaceMesh s;
    s.periods = m.periods;
    s.minimal = m.minimal;
    s.meta = m.meta;
    const bool has_param = !m.param_coords.empty();
    std::vector<int> vmap(m.vertices.size(), -1);
    std::map<std::tuple<int, int, int>, int> cuts;
    auto origin = [&](int v) { return m.vertex_origin.empty() ? v : m.vertex_origin[static_cast<size_t>(v)]; };
    auto keep_vertex = [&](int v) {
        if (vmap[static_cast<size_t>(v)] < 0) {
            vmap[static_cast<size_t>(v)] = s.n_vertices();
            s.vertices.push_back(m.vertices[static_cast<size_t>(v)]);
            s.normal.push_back(m.normal[static_cast<size_t>(v)]);
            s.K.push_back(m.K[static_cast<size_t>(v)]);
            s.normA2.push_back(m.normA2[static_cast<size_t>(v)]);
            if (has_param) s.param_coords.push_back(m.param_coords[static_cast<size_t>(v)]);
            s.vertex_origin.push_back(origin(v));
        }
        return vmap[static_cast<size_t>(v)];
    };
    auto cut_vertex = [&](int a, int b, int level) {
        if (a > b) std::swap(a, b);
        auto key = std::make_tuple(a, b, level);
        auto it = cuts.find(key);
        if (it != cuts.end()) return it->second;
        const double L = level == 0 ? lo : hi;
        const double t = (L - f[static_cast<size_t>(a)]) / (f[static_cast<size_t>(b)] - f[static_cast<size_t>(a)]);
        const int id = s.n_vertices();
        s.vertices.push_back(m.vertices[static_cast<size_t>(a)] + t * edge_vec(m, a, b));
        s.normal.push_back(((1 - t) * m.normal[static_cast<size_t>(a)] + t * m.normal[static_cast<size_t>(b)]).normalized());
        s.K.push_back((1 - t) * m.K[static_cast<size_t>(a)] + t * m.K[static_cast<size_t>(b)]);
        s.normA2.push_back((1 - t) * m.normA2[static_cast<size_t>(a)] + t * m.normA2[static_cast<size_t>(b)]);
        if (has_param)
            s.param_coords.push_back((1 - t) * m.param_coords[static_cast<size_t>(a)] + t * m.param_coords[static_cast<size_t>(b)]);
        s.vertex_origin.push_back(-1);
        cuts.emplace(key, id);
        return id;
    };
    auto inside = [&](double x) { return x >= lo && x <= hi; };
    for (const auto& T : m.triangles) {
        std::vector<int> poly;
        for (int k = 0; k < 3; ++k) {
            const int a = T[k], b = T[(k + 1) % 3];
            const double fa = f[static_cast<size_t>(a)], fb = f[static_cast<size_t>(b)];
            if (inside(fa)) poly.push_back(keep_vertex(a));
            std::vector<std::pair<double, int>> pts;
            for (int level = 0; level < 2; ++level) {
                const double L = level == 0 ? lo : hi;
                if (!std::isfinite(L)) continue;
                if ((fa - L) * (fb - L) < 0) pts.emplace_back((L - fa) / (fb - fa), level);
            }
            std::sort(pts.begin(), pts.end());
            for (const auto& [t, level] : pts) poly.push_back(cut_vertex(a, b, level));
        }
        for (size_t k = 1; k + 1 < poly.size(); ++k) {
            Tri t{poly[0], poly[k], poly[k + 1]};
            const Vec3 e1 = min_image(s.periods, s.vertices[static_cast<size_t>(t[1])] - s.vertices[static_cast<size_t>(t[0])]);
            const Vec3 e2 = min_image(s.periods, s.vertices[static_cast<size_t>(t[2])] - s.vertices[static_cast<size_t>(t[0])]);
            const double scale = std::max(e1.squaredNorm(), e2.squaredNorm());
            if (e1.cross(e2).norm() <= 1e-12 * scale) continue;
            s.triangles.push_back(t);
        }
    }
    // drop vertices orphaned by skipped slivers
    std::vector<int> used(s.vertices.size(), 0);
    for (const auto& T : s.triangles)
        for (int v : T) used[static_cast<size_t>(v)] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
        std::vector<int> all(static_cast<size_t>(s.n_triangles()));
        std::iota(all.begin(), all.end(), 0);
        SurfaceMesh c = submesh(s, all);
        // submesh composed origins through s.vertex_origin already
        return c;
    }
    s.boundary_loops = compute_boundary_loops(s.triangles);
    return s;
}

/// Triangle sets of the connected components (through shared vertices).
inline std::vector<std::vector<int>> connected_components(const SurfaceMesh& m) {
    std::vector<int> parent(m.vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
        return x;
    };
    for (const auto& T : m.triangles) {
        parent[static_cast<size_t>(find(T[1]))] = find(T[0]);
        parent[static_cast<size_t>(find(T[2]))] = find(T[0]);
    }
    std::map<int, std::vector<int>> comps;
    for (int t = 0; t < m.n_triangles(); ++t) comps[find(m.triangles[static_cast<size_t>(t)][0])].push_back(t);
    std::vector<std::vector<int>> out;
    for (auto& [r, ts] : comps) out.push_back(std::move(ts));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

/// One triangle of each involution pair: those whose Gauss-image centroid lies on the positive
/// side of a fixed generic direction.
inline SurfaceMesh fundamental_domain(const SurfaceMesh& m) {
    if (!m.involution) throw MeshError("fundamental_domain: mesh has no involution");
    const Vec3 u = Vec3(0.3, 0.5, 0.8).normalized();
    std::vector<int> keep;
    for (int t = 0; t < m.n_triangles(); ++t) {
        const Tri& T = m.triangles[static_cast<size_t>(t)];
        const Vec3 c = m.normal[T[0]] + m.normal[T[1]] + m.normal[T[2]];
        if (c.dot(u) > 0) keep.push_back(t);
    }
    SurfaceMesh s = submesh(m, keep);
    s.meta["fundamental_domain"] = true;
    return s;
}

// ------------------------------------------------------------------ distances

enum class DistanceMethod { fast_marching, dijkstra };

inline std::string to_string(DistanceMethod d) { return d == DistanceMethod::dijkstra ? "dijkstra" : "fast_marching"; }

namespace detail {

// Eikonal update on triangle (A, B, C) with A at the origin: the linear interpolant of
// (dA, dB, dC) has unit gradient, and the gradient at C points out of the cone spanned by
// C - A and C - B. Returns +inf when no causal solution exists.
inline double unfold_update(const Vec3& ab, const Vec3& ac, double dA, double dB) {
    const double g11 = ab.dot(ab), g12 = ab.dot(ac), g22 = ac.dot(ac);
    const double det = g11 * g22 - g12 * g12;
    const double inf = std::numeric_limits<double>::infinity();
    if (!(det > 1e-14 * g11 * g22)) return inf;
    const double q11 = g22 / det, q12 = -g12 / det, q22 = g11 / det;
    const double u = dB - dA;
    const double disc = q12 * q12 * u * u - q22 * (q11 * u * u - 1.0);
    if (disc < 0) return inf;
    const double s = (-q12 * u + std::sqrt(disc)) / q22;
    const double l1 = q11 * u + q12 * s;
    const double l2 = q12 * u + q22 * s;
    if (l1 > 0 || l1 + l2 < 0) return inf;
    return dA + s;
}

// Update of `target` from `self` once `other` is known, positions in the plane of an
// unfolded strip with the target at the origin.
struct VirtualUpdate {
    int target = 0, other = 0;
    Eigen::Vector2d self_pos, other_pos;
};

inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Obtuse corners split by a virtual vertex found by unfolding neighbouring triangles
// along the angle bisector until a vertex lands inside the acute sub-cones.
inline std::vector<std::vector<VirtualUpdate>> obtuse_virtual_updates(const SurfaceMesh& m) {
    std::vector<std::vector<VirtualUpdate>> out(m.vertices.size());
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (int t = 0; t < m.n_triangles(); ++t) {
        const Tri& T = m.triangles[static_cast<size_t>(t)];
        for (int k = 0; k < 3; ++k) edge_tris[std::minmax(T[k], T[(k + 1) % 3])].push_back(t);
    }
    // Acute corners: the neighbour across the opposite edge, when the unfolded quad is convex.
    auto one_step = [&](int u, int v, int w, int t, const Vec3& e1, const Vec3& e2) {
        int t2 = -1;
        for (int c : edge_tris[std::minmax(v, w)])
            if (c != t) t2 = c;
        if (t2 < 0) return;
        const Tri& T2 = m.triangles[static_cast<size_t>(t2)];
        const int x = T2[0] + T2[1] + T2[2] - v - w;
        const double ang = std::acos(std::clamp(e1.dot(e2) / (e1.norm() * e2.norm()), -1.0, 1.0));
        const Eigen::Vector2d Pv(e1.norm(), 0), Pw = e2.norm() * Eigen::Vector2d(std::cos(ang), std::sin(ang));
        const double lvx = edge_vec(m, v, x).norm(), lwx = edge_vec(m, w, x).norm();
        const Eigen::Vector2d dir = Pw - Pv;
        const double len = dir.norm();
        const double a = (lvx * lvx - lwx * lwx + len * len) / (2 * len);
        const double h = std::sqrt(std::max(0.0, lvx * lvx - a * a));
        const Eigen::Vector2d perp(-dir.y() / len, dir.x() / len);
        const Eigen::Vector2d X = Pv + a * dir / len - h * perp;  // origin lies to the left of v -> w
        if (!(cross2(Pv, X) > 0 && cross2(X, Pw) > 0 && a > 0 && a < len)) return;
        out[static_cast<size_t>(v)].push_back({u, x, Pv, X});
        out[static_cast<size_t>(x)].push_back({u, v, X, Pv});
        out[static_cast<size_t>(x)].push_back({u, w, X, Pw});
        out[static_cast<size_t>(w)].push_back({u, x, Pw, X});
    };
    for (int t = 0; t < m.n_triangles(); ++t) {
        const Tri& T = m.triangles[static_cast<size_t>(t)];
        for (int k = 0; k < 3; ++k) {
            const int u = T[k], v = T[(k + 1) % 3], w = T[(k + 2) % 3];
            const Vec3 e1 = edge_vec(m, u, v), e2 = edge_vec(m, u, w);
            if (e1.dot(e2) >= 0) {
                one_step(u, v, w, t, e1, e2);
                continue;
            }
            const double ang = std::acos(std::clamp(e1.dot(e2) / (e1.norm() * e2.norm()), -1.0, 1.0));
            const Eigen::Vector2d Pv(e1.norm(), 0), Pw = e2.norm() * Eigen::Vector2d(std::cos(ang), std::sin(ang));
            const Eigen::Vector2d bis = (Pv.normalized() + Pw.normalized()).normalized();
            int p = v, q = w, prev = t;
            Eigen::Vector2d Pp = Pv, Pq = Pw, O = Eigen::Vector2d::Zero();
            for (int step = 0; step < 12; ++step) {
                const auto& adj = edge_tris[std::minmax(p, q)];
                int t2 = -1;
                for (int c : adj)
                    if (c != prev) t2 = c;
                if (t2 < 0) break;
                const Tri& T2 = m.triangles[static_cast<size_t>(t2)];
                const int x = T2[0] + T2[1] + T2[2] - p - q;
                const double lpx = edge_vec(m, p, x).norm(), lqx = edge_vec(m, q, x).norm();
                const Eigen::Vector2d dir = Pq - Pp;
                const double len = dir.norm();
                const double a = (lpx * lpx - lqx * lqx + len * len) / (2 * len);
                const double h = std::sqrt(std::max(0.0, lpx * lpx - a * a));
                const Eigen::Vector2d perp(-dir.y() / len, dir.x() / len);
                const double sideO = cross2(dir, O - Pp);
                const Eigen::Vector2d X = Pp + a * dir / len - (sideO > 0 ? 1.0 : -1.0) * h * perp;
                if (cross2(Pv, X) > 0 && cross2(X, Pw) > 0 && X.dot(Pv) >= 0 && X.dot(Pw) >= 0) {
                    out[static_cast<size_t>(v)].push_back({u, x, Pv, X});
                    out[static_cast<size_t>(x)].push_back({u, v, X, Pv});
                    out[static_cast<size_t>(x)].push_back({u, w, X, Pw});
                    out[static_cast<size_t>(w)].push_back({u, x, Pw, X});
                    break;
                }
                if ((cross2(bis, X) > 0) == (cross2(bis, Pp) > 0)) {
                    O = Pp;
                    p = x;
                    Pp = X;
                } else {
                    O = Pq;
                    q = x;
                    Pq = X;
                }
                prev = t2;
            }
        }
    }
    return out;
}

} // namespace detail

/// Approximate intrinsic distance to a set of source vertices.
inline std::vector<double> geodesic_distances(const SurfaceMesh& m, const std::vector<int>& sources,
                                              DistanceMethod method = DistanceMethod::fast_marching, int init_rings = 3) {
    const double inf = std::numeric_limits<double>::infinity();
    if (sources.empty()) throw std::invalid_argument("geodesic_distances: no source");
    const auto vt = vertex_triangles(m);
    std::vector<double> d(m.vertices.size(), inf);
    std::vector<char> done(m.vertices.size(), 0);
    const auto virt = method == DistanceMethod::fast_marching ? detail::obtuse_virtual_updates(m)
                                                            : std::vector<std::vector<detail::VirtualUpdate>>{};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int source : sources) {
        if (source < 0 || source >= m.n_vertices()) throw std::invalid_argument("geodesic_distances: bad source vertex");
        d[static_cast<size_t>(source)] = 0;
        pq.emplace(0.0, source);
    }
    // Front initialisation: chord lengths are exact to third order near a source.
    if (method == DistanceMethod::fast_marching && init_rings > 0) {
        for (int source : sources) {
            std::vector<int> ring{source}, seen{source};
            for (int h = 0; h < init_rings; ++h) {
                std::vector<int> next;
                for (int a : ring)
                    for (int t : vt[static_cast<size_t>(a)])
                        for (int b : m.triangles[static_cast<size_t>(t)])
                            if (std::find(seen.begin(), seen.end(), b) == seen.end()) {
                                seen.push_back(b);
                                next.push_back(b);
                            }
                ring = std::move(next);
            }
            for (int b : seen) {
                const double c = edge_vec(m, source, b).norm();
                if (c < d[static_cast<size_t>(b)]) {
                    d[static_cast<size_t>(b)] = c;
                    pq.emplace(c, b);
                }
            }
        }
    }
    while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (done[static_cast<size_t>(v)] || dv > d[static_cast<size_t>(v)]) continue;
        done[static_cast<size_t>(v)] = 1;
        for (int t : vt[static_cast<size_t>(v)]) {
            const Tri& T = m.triangles[static_cast<size_t>(t)];
            for (int k = 0; k < 3; ++k) {
                const int u = T[k];
                if (u == v || done[static_cast<size_t>(u)]) continue;
                double cand = dv + edge_vec(m, v, u).norm();
                if (method == DistanceMethod::fast_marching) {
                    const int w = T[0] + T[1] + T[2] - u - v;
                    if (done[static_cast<size_t>(w)])
                        cand = std::min(cand, detail::unfold_update(edge_vec(m, v, w), edge_vec(m, v, u), dv, d[static_cast<size_t>(w)]));
                }
                if (cand < d[static_cast<size_t>(u)]) {
                    d[static_cast<size_t>(u)] = cand;
                    pq.emplace(cand, u);
                }
            }
        }
        if (virt.empty()) continue;
        for (const auto& vu : virt[static_cast<size_t>(v)]) {
            if (done[static_cast<size_t>(vu.target)] || !done[static_cast<size_t>(vu.other)]) continue;
            const Eigen::Vector2d ab = vu.other_pos - vu.self_pos, ac = -vu.self_pos;
            const double cand = detail::unfold_update(Vec3(ab.x(), ab.y(), 0), Vec3(ac.x(), ac.y(), 0), dv,
                                                      d[static_cast<size_t>(vu.other)]);
            if (cand < d[static_cast<size_t>(vu.target)]) {
                d[static_cast<size_t>(vu.target)] = cand;
                pq.emplace(cand, vu.target);
            }
        }
    }
    return d;
}

inline std::vector<double> geodesic_distances(const SurfaceMesh& m, int source, DistanceMethod method = DistanceMethod::fast_marching) {
    return geodesic_distances(m, std::vector<int>{source}, method);
}

/// Intrinsic ball, cut along the interpolated level set of the distance.
inline SurfaceMesh geodesic_ball(const SurfaceMesh& m, int center, double radius,
                                 DistanceMethod method = DistanceMethod::fast_marching) {
    if (!(radius > 0)) throw std::invalid_argument("geodesic_ball: radius must be positive");
    const auto d = geodesic_distances(m, center, method);
    SurfaceMesh s = clip_by_values(m, d, -std::numeric_limits<double>::infinity(), radius);
    if (s.triangles.empty()) throw MeshError("geodesic_ball: empty ball");
    bool clipped = false;
    for (const auto& loop : m.boundary_loops)
        for (int v : loop) clipped = clipped || d[static_cast<size_t>(v)] < radius;
    s.meta["ball"] = {{"center", center}, {"radius", radius}, {"distance_method", to_string(method)},
                      {"clipped_by_boundary", clipped}};
    return s;
}

/// Original vertices inside a ball (for monotonicity checks).
inline std::set<int> ball_vertex_set(const SurfaceMesh& ball) {
    std::set<int> out;
    for (int o : ball.vertex_origin)
        if (o >= 0) out.insert(o);
    return out;
}

/// Region r_in <= |x - center| <= r_out; the component containing `seed` (a source vertex), or all.
inline SurfaceMesh extrinsic_slab(const SurfaceMesh& m, const Vec3& center, double r_in, double r_out,
                                  std::optional<int> seed = std::nullopt) {
    if (!(r_in >= 0 && r_in < r_out)) throw std::invalid_argument("extrinsic_slab: need 0 <= r_in < r_out");
    if (!m.periods.empty()) throw std::invalid_argument("extrinsic_slab: not defined on a periodic mesh");
    std::vector<double> r(m.vertices.size());
    for (size_t v = 0; v < r.size(); ++v) r[v] = (m.vertices[v] - center).norm();
    SurfaceMesh s = clip_by_values(m, r, r_in, r_out);
    if (s.triangles.empty()) throw MeshError("extrinsic_slab: empty intersection");
    if (seed) {
        const auto comps = connected_components(s);
        for (const auto& c : comps)
            for (int t : c)
                for (int v : s.triangles[static_cast<size_t>(t)])
                    if (s.vertex_origin[static_cast<size_t>(v)] == *seed) {
                        SurfaceMesh out = submesh(s, c);
                        out.meta["slab"] = {{"r_in", r_in}, {"r_out", r_out}, {"seed", *seed}};
                        return out;
                    }
        throw MeshError("extrinsic_slab: seed vertex not in the slab");
    }
    s.meta["slab"] = {{"r_in", r_in}, {"r_out", std::isfinite(r_out) ? json(r_out) : json("inf")}};
    return s;
}

/// Positions scaled by lambda; curvature fields rescaled to match.
inline SurfaceMesh scaled(const SurfaceMesh& m, double lambda) {
    SurfaceMesh s = m;
    for (auto& v : s.vertices) v *= lambda;
    for (auto& p : s.periods) p *= lambda;
    for (auto& k : s.K) k /= lambda * lambda;
    for (auto& a : s.normA2) a /= lambda * lambda;
    return s;
}

// ------------------------------------------------------------------ json

inline json to_json(const SurfaceMesh& m) {
    json V = json::array(), T = json::array(), N = json::array(), P = json::array();
    for (const auto& v : m.vertices) V.push_back({v.x(), v.y(), v.z()});
    for (const auto& t : m.triangles) T.push_back({t[0], t[1], t[2]});
    for (const auto& n : m.normal) N.push_back({n.x(), n.y(), n.z()});
    for (const auto& p : m.param_coords) P.push_back({p.real(), p.imag()});
    json j{{"vertices", V}, {"triangles", T}, {"K", m.K}, {"normA2", m.normA2},
           {"boundary_loops", m.boundary_loops}, {"normal", N}, {"param_coords", P}, {"meta", m.meta}};
    if (m.involution) j["involution"] = *m.involution;
    if (!m.periods.empty()) {
        json per = json::array();
        for (const auto& p : m.periods) per.push_back({p.x(), p.y(), p.z()});
        j["periods"] = per;
    }
    return j;
}

inline SurfaceMesh mesh_from_json(const json& j) {
    SurfaceMesh m;
    for (const auto& v : j.at("vertices")) m.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>());
    for (const auto& t : j.at("triangles")) m.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    m.K = j.at("K").get<std::vector<double>>();
    m.normA2 = j.at("normA2").get<std::vector<double>>();
    for (const auto& t : m.triangles)
        for (int v : t)
            if (v < 0 || v >= m.n_vertices()) throw std::invalid_argument("mesh: triangle index out of range");
    if (j.contains("periods"))
        for (const auto& p : j.at("periods")) m.periods.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    if (j.contains("normal")) {
        for (const auto& n : j.at("normal")) m.normal.emplace_back(n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>());
    } else {
        // area-weighted triangle normals
        m.normal.assign(m.vertices.size(), Vec3::Zero());
        for (const auto& t : m.triangles) {
            const Vec3 n = edge_vec(m, t[0], t[1]).cross(edge_vec(m, t[0], t[2]));
            for (int v : t) m.normal[static_cast<size_t>(v)] += n;
        }
        for (auto& n : m.normal) n.normalize();
    }
    if (j.contains("param_coords"))
        for (const auto& p : j.at("param_coords")) m.param_coords.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    if (j.contains("boundary_loops")) m.boundary_loops = j.at("boundary_loops").get<std::vector<std::vector<int>>>();
    else m.boundary_loops = compute_boundary_loops(m.triangles);
    if (j.contains("involution")) m.involution = j.at("involution").get<std::vector<int>>();
    if (j.contains("meta")) m.meta = j.at("meta");
    if (m.K.size() != m.vertices.size() || m.normA2.size() != m.vertices.size() || m.normal.size() != m.vertices.size())
        throw std::invalid_argument("mesh: per-vertex field size mismatch");
    return m;
}

} // namespace cmc
