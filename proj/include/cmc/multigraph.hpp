#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmc/mesh.hpp"
#include "cmc/report.hpp"

namespace cmc {

/// A closed (or open, if it ran into the mesh boundary) polyline on the surface.
struct SurfaceCurve {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    bool closed = true;

    double length() const {
        double L = 0;
        const size_t n = points.size();
        for (size_t i = 0; i + 1 < n; ++i) L += (points[i + 1] - points[i]).norm();
        if (closed && n > 1) L += (points.front() - points.back()).norm();
        return L;
    }
    void reverse() {
        std::reverse(points.begin(), points.end());
        std::reverse(normals.begin(), normals.end());
    }
};

/// Intersection with the sphere |x - c| = R, by linear interpolation along crossing edges.
inline std::vector<SurfaceCurve> sphere_slice(const SurfaceMesh& m, double R, const Vec3& c = Vec3::Zero()) {
    if (!m.periods.empty()) throw std::invalid_argument("sphere_slice: not defined on a periodic mesh");
    const size_t n = m.vertices.size();
    std::vector<double> f(n);
    for (size_t v = 0; v < n; ++v) f[v] = (m.vertices[v] - c).norm() - R;
    auto pos = [&](double x) { return x >= 0; };
    using Key = std::pair<int, int>;
    std::map<Key, std::vector<Key>> adj;  // edge -> edges linked through a triangle
    for (const auto& T : m.triangles) {
        std::vector<Key> cut;
        for (int k = 0; k < 3; ++k) {
            const int a = T[k], b = T[(k + 1) % 3];
            if (pos(f[static_cast<size_t>(a)]) != pos(f[static_cast<size_t>(b)])) cut.emplace_back(std::min(a, b), std::max(a, b));
        }
        if (cut.size() == 2) {
            adj[cut[0]].push_back(cut[1]);
            adj[cut[1]].push_back(cut[0]);
        }
    }
    auto point = [&](const Key& e, Vec3& p, Vec3& nrm) {
        const int a = e.first, b = e.second;
        const double t = f[static_cast<size_t>(a)] / (f[static_cast<size_t>(a)] - f[static_cast<size_t>(b)]);
        p = m.vertices[static_cast<size_t>(a)] + t * (m.vertices[static_cast<size_t>(b)] - m.vertices[static_cast<size_t>(a)]);
        nrm = ((1 - t) * m.normal[static_cast<size_t>(a)] + t * m.normal[static_cast<size_t>(b)]).normalized();
    };
    std::vector<SurfaceCurve> out;
    std::set<Key> seen;
    // open chains first (start at edges of degree 1), then closed loops
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& [e0, nb] : adj) {
            if (seen.count(e0)) continue;
            if (pass == 0 && nb.size() != 1) continue;
            SurfaceCurve cv;
            cv.closed = pass == 1;
            Key prev{-1, -1}, cur = e0;
            while (true) {
                seen.insert(cur);
                Vec3 p, nrm;
                point(cur, p, nrm);
                // a vertex lying on the sphere is hit by several edges
                if (cv.points.empty() || (p - cv.points.back()).norm() > 1e-12 * R) {
                    cv.points.push_back(p);
                    cv.normals.push_back(nrm);
                }
                const auto& nbs = adj[cur];
                Key next{-1, -1};
                for (const auto& k : nbs)
                    if (k != prev && !seen.count(k)) { next = k; break; }
                if (next.first < 0) break;
                prev = cur;
                cur = next;
            }
            if (cv.closed && cv.points.size() > 1 && (cv.points.front() - cv.points.back()).norm() <= 1e-12 * R) {
                cv.points.pop_back();
                cv.normals.pop_back();
            }
            if (cv.points.size() >= 2) out.push_back(std::move(cv));
        }
    return out;
}

/// Orient a slice so that the side |x - c| < R lies on the left (N x T points inward).
inline void orient_inward(SurfaceCurve& cv, const Vec3& c = Vec3::Zero()) {
    double score = 0;
    const size_t n = cv.points.size();
    for (size_t i = 0; i + 1 < n + (cv.closed ? 1 : 0); ++i) {
        const Vec3& p = cv.points[i];
        const Vec3& q = cv.points[(i + 1) % n];
        const Vec3 T = q - p;
        const Vec3 N = (cv.normals[i] + cv.normals[(i + 1) % n]).normalized();
        score += N.cross(T).dot(-(0.5 * (p + q) - c).normalized());
    }
    if (score < 0) cv.reverse();
}

/// Sum of signed turning angles measured in the tangent planes (closed curves only).
inline double turning_sum(const SurfaceCurve& cv) {
    if (!cv.closed) throw std::invalid_argument("turning_sum: curve is not closed");
    const size_t n = cv.points.size();
    double k = 0;
    for (size_t i = 0; i < n; ++i) {
        const Vec3& N = cv.normals[i];
        Vec3 tin = cv.points[i] - cv.points[(i + n - 1) % n];
        Vec3 tout = cv.points[(i + 1) % n] - cv.points[i];
        tin -= tin.dot(N) * N;
        tout -= tout.dot(N) * N;
        k += std::atan2(N.dot(tin.cross(tout)), tin.dot(tout));
    }
    return k;
}

/// Winding number of the curve's projection to the plane orthogonal to v, about c.
inline int projected_winding(const SurfaceCurve& cv, const Vec3& v, const Vec3& c = Vec3::Zero()) {
    const Vec3 a = (std::fabs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(v).normalized();
    const Vec3 b = v.cross(a);
    double total = 0, prev = 0, scale = 0;
    const size_t n = cv.points.size();
    for (const auto& p : cv.points) scale = std::max(scale, (p - c).norm());
    for (size_t i = 0; i <= n; ++i) {
        const Vec3 p = cv.points[i % n] - c;
        const double x = p.dot(a), y = p.dot(b);
        if (std::hypot(x, y) < 1e-12 * std::max(scale, 1.0)) throw std::domain_error("multiplicity: projection hits the origin");
        const double ang = std::atan2(y, x);
        if (i > 0) {
            double d = ang - prev;
            while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
            while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
            total += d;
        }
        prev = ang;
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

/// Principal axis of sum N N^T, area-weighted over the given mesh.
inline Vec3 principal_normal(const SurfaceMesh& m) {
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    for (int t = 0; t < m.n_triangles(); ++t) {
        const double a = triangle_area(m, t) / 3.0;
        for (int v : m.triangles[static_cast<size_t>(t)]) S += a * m.normal[static_cast<size_t>(v)] * m.normal[static_cast<size_t>(v)].transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
    Vec3 v = es.eigenvectors().col(2);
    if (v.z() < 0 || (v.z() == 0 && v.x() < 0)) v = -v;
    return v;
}

/// f1 = f2 = min(tau, 8 alpha).
inline double tolerance_schedule(double alpha, double tau) { return std::min(tau, 8.0 * alpha); }

struct AnnulusCheck {
    double R1 = 0, R2 = 0, alpha = 0, L0 = 0, tau = 0;
    std::vector<Vec3> plane_normals;      // one per dyadic band
    int m = 0;
    std::map<std::string, double> residuals;
    std::map<std::string, bool> flags;
    std::map<std::string, double> info;   // reported, not checked

    bool pass() const {
        for (const auto& [k, v] : flags)
            if (!v) return false;
        return true;
    }
};

inline json to_json(const AnnulusCheck& a) {
    json normals = json::array();
    for (const auto& v : a.plane_normals) normals.push_back({v.x(), v.y(), v.z()});
    json res = json::object(), fl = json::object(), info = json::object();
    for (const auto& [k, v] : a.residuals) res[k] = v;
    for (const auto& [k, v] : a.flags) fl[k] = v;
    for (const auto& [k, v] : a.info) info[k] = v;
    return json{{"R1", a.R1}, {"R2", a.R2}, {"alpha", a.alpha}, {"L0", a.L0}, {"tau", a.tau},
                {"plane_normals", normals}, {"m", a.m}, {"residuals", res}, {"flags", fl}, {"info", info},
                {"pass", a.pass()}};
}

inline void require_spans(const SurfaceMesh& m, double R1, double R2) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& v : m.vertices) {
        lo = std::min(lo, v.norm());
        hi = std::max(hi, v.norm());
    }
    if (!(lo <= R1 && hi >= R2)) throw std::invalid_argument("multigraph: mesh does not span the radii");
}

/// Sphere-angle, Gauss-spread and slice-length hypotheses over dyadic bands of [R1, R2].
inline AnnulusCheck check_hypotheses(const SurfaceMesh& m, double R1, double R2, double alpha, double L0) {
    if (!(R1 > 0 && R1 < R2)) throw std::invalid_argument("check_hypotheses: need 0 < R1 < R2");
    require_spans(m, R1, R2);
    AnnulusCheck a;
    a.R1 = R1;
    a.R2 = R2;
    a.alpha = alpha;
    a.L0 = L0;
    double worst_angle = 0, worst_spread = 0;
    for (double lo = R1; lo < R2 * (1 - 1e-12); lo *= 2) {
        const double hi = std::min(2 * lo, R2);
        const SurfaceMesh band = extrinsic_slab(m, Vec3::Zero(), lo, hi);
        for (int v = 0; v < band.n_vertices(); ++v) {
            const Vec3& x = band.vertices[static_cast<size_t>(v)];
            worst_angle = std::max(worst_angle, std::asin(std::min(1.0, std::fabs(band.normal[static_cast<size_t>(v)].dot(x.normalized())))));
        }
        const Vec3 pn = principal_normal(band);
        a.plane_normals.push_back(pn);
        for (const auto& nrm : band.normal) worst_spread = std::max(worst_spread, std::acos(std::min(1.0, std::fabs(nrm.dot(pn)))));
    }
    double L = 0;
    for (const auto& cv : sphere_slice(m, R1)) L += cv.length();
    a.residuals["B1_angle_deficit"] = worst_angle;
    a.residuals["B2_gauss_spread"] = worst_spread;
    a.residuals["B3_length_ratio"] = L / R1;
    a.flags["B1"] = worst_angle <= alpha;
    a.flags["B2"] = worst_spread <= alpha;
    a.flags["B3"] = L / R1 < L0;
    return a;
}

/// Number of sheets: |winding| of the slice projection, summed over slice loops.
inline int multiplicity(const SurfaceMesh& m, const Vec3& plane_normal, double R, std::optional<double> L0 = std::nullopt) {
    int total = 0;
    const auto slices = sphere_slice(m, R);
    if (slices.empty()) throw MeshError("multiplicity: empty slice");
    for (const auto& cv : slices) {
        if (!cv.closed) throw MeshError("multiplicity: slice runs into the mesh boundary");
        total += std::abs(projected_winding(cv, plane_normal.normalized()));
    }
    if (L0 && total > (*L0 + 1) / (2 * std::numbers::pi)) throw MeshError("multiplicity exceeds (L0 + 1) / (2 pi)");
    return total;
}

struct GeodesicCurvature {
    double kappa = 0;
    int m = 0;
    double deviation = 0;  // |kappa - 2 pi m|
    int loops = 0;
};

inline json to_json(const GeodesicCurvature& g) {
    return json{{"kappa", g.kappa}, {"m", g.m}, {"deviation", g.deviation}, {"loops", g.loops}};
}

/// Total geodesic curvature of the slice at radius R, as the boundary of the inner region.
inline GeodesicCurvature boundary_geodesic_curvature(const SurfaceMesh& m, double R) {
    auto slices = sphere_slice(m, R);
    if (slices.empty()) throw MeshError("boundary_geodesic_curvature: empty slice");
    GeodesicCurvature g;
    SurfaceMesh band;
    for (auto& cv : slices) {
        if (!cv.closed) throw MeshError("boundary_geodesic_curvature: slice runs into the mesh boundary");
        orient_inward(cv);
        g.kappa += turning_sum(cv);
        ++g.loops;
    }
    // plane from the slice normals
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    for (const auto& cv : slices)
        for (const auto& n : cv.normals) S += n * n.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
    const Vec3 v = es.eigenvectors().col(2);
    for (const auto& cv : slices) g.m += std::abs(projected_winding(cv, v));
    g.deviation = std::fabs(g.kappa - 2 * std::numbers::pi * g.m);
    return g;
}

/// Length, distance and area conclusions between radii R1 and R, plus the graph bound.
inline AnnulusCheck check_conclusions(const SurfaceMesh& m, int mult, double R1, double R, double tau, double alpha,
                                      std::optional<Vec3> plane_normal = std::nullopt) {
    if (!(R1 > 0 && R1 < R)) throw std::invalid_argument("check_conclusions: need 0 < R1 < R");
    if (mult < 1) throw std::invalid_argument("check_conclusions: m must be >= 1");
    require_spans(m, R1, R);
    AnnulusCheck a;
    a.R1 = R1;
    a.R2 = R;
    a.alpha = alpha;
    a.tau = tau;
    a.m = mult;
    const double f = tolerance_schedule(alpha, tau);
    const double pi = std::numbers::pi;

    double L = 0;
    for (const auto& cv : sphere_slice(m, R)) L += cv.length();
    a.residuals["C1_length_residual"] = std::fabs(L - 2 * pi * mult * R) / R;
    a.flags["C1"] = a.residuals["C1_length_residual"] < f;

    const SurfaceMesh region = extrinsic_slab(m, Vec3::Zero(), R1, R);
    // sources: boundary vertices on the inner sphere; cut vertices sit on the chord, not the sphere
    std::vector<int> inner, outer;
    const auto onb = boundary_mask(region);
    for (int v = 0; v < region.n_vertices(); ++v) {
        if (!onb[static_cast<size_t>(v)]) continue;
        const double r = region.vertices[static_cast<size_t>(v)].norm();
        if (std::fabs(r - R1) <= 1e-3 * R1) inner.push_back(v);
        else if (std::fabs(r - R) <= 1e-3 * R) outer.push_back(v);
    }
    if (inner.empty() || outer.empty()) throw MeshError("check_conclusions: region does not reach both spheres");
    const auto d = geodesic_distances(region, inner);
    double dmax = 0;
    for (int v : outer) dmax = std::max(dmax, d[static_cast<size_t>(v)]);
    a.residuals["C2_distance_ratio"] = dmax / (R - R1);
    a.flags["C2"] = a.residuals["C2_distance_ratio"] <= std::sqrt(1 + tau * tau / 4);

    const double area = mesh_area(region);
    const double target = pi * mult * (R * R - R1 * R1);
    a.residuals["C3_area_residual"] = std::fabs(area - target) / (R * R - R1 * R1);
    a.flags["C3"] = a.residuals["C3_area_residual"] < f;
    a.info["C3_printed_form"] = std::fabs(area - target) / (R - R1);
    a.info["area"] = area;
    a.info["length"] = L;

    const Vec3 v = plane_normal ? plane_normal->normalized() : principal_normal(region);
    a.plane_normals.push_back(v);
    double graph = 0;
    for (int i = 0; i < region.n_vertices(); ++i) {
        const Vec3& x = region.vertices[static_cast<size_t>(i)];
        const double c = std::min(1.0, std::fabs(region.normal[static_cast<size_t>(i)].dot(v)));
        const double grad = c > 0 ? std::sqrt(std::max(0.0, 1 - c * c)) / c : std::numeric_limits<double>::infinity();
        graph = std::max(graph, std::fabs(x.dot(v)) / x.norm() + grad);
    }
    a.residuals["graph_bound"] = graph;
    a.flags["graph"] = graph < tau / 2;
    return a;
}

/// Area sandwich, curvature floor and boundary-curvature aggregation for one concentration piece.
inline VerificationReport delta_piece_report(const SurfaceMesh& piece, const std::vector<int>& m_list, double r_F,
                                             double delta1, double tau) {
    if (m_list.empty()) throw std::invalid_argument("delta_piece_report: empty multiplicity list");
    if (piece.K.size() != piece.vertices.size()) throw std::invalid_argument("delta_piece_report: missing curvature field");
    VerificationReport rep{"delta_piece", {}};
    const double pi = std::numbers::pi;
    int S = 0;
    for (int x : m_list) S += x;
    const double area = mesh_area(piece);
    rep.add_leq("Area <= 2 pi m r_F^2", area, 2 * pi * S * r_F * r_F);
    rep.add_geq("Area >= pi delta1^2", area, pi * delta1 * delta1);
    const double mk = -total_curvature(piece);
    rep.add_geq("-int K > 3 pi", mk, 3 * pi, mk > 3 * pi ? "" : "not a concentration piece");
    rep.checks.back().pass = mk > 3 * pi;
    // boundary loops with the piece on their left
    double kappa = 0;
    const auto vt = vertex_triangles(piece);
    for (const auto& loop : piece.boundary_loops) {
        SurfaceCurve cv;
        for (int v : loop) {
            cv.points.push_back(piece.vertices[static_cast<size_t>(v)]);
            cv.normals.push_back(piece.normal[static_cast<size_t>(v)]);
        }
        // orientation from the triangle on the first boundary edge
        const int a = loop[0], b = loop[1 % loop.size()];
        double side = 0;
        for (int t : vt[static_cast<size_t>(a)]) {
            const Tri& T = piece.triangles[static_cast<size_t>(t)];
            if (std::find(T.begin(), T.end(), b) == T.end()) continue;
            const int c = T[0] + T[1] + T[2] - a - b;
            const Vec3 N = (piece.normal[static_cast<size_t>(a)] + piece.normal[static_cast<size_t>(b)]).normalized();
            const Vec3 Tg = piece.vertices[static_cast<size_t>(b)] - piece.vertices[static_cast<size_t>(a)];
            side = N.cross(Tg).dot(piece.vertices[static_cast<size_t>(c)] - piece.vertices[static_cast<size_t>(a)]);
        }
        if (side < 0) cv.reverse();
        kappa += turning_sum(cv);
    }
    rep.add_geq("2 pi S - tau/2 <= kappa(boundary)", kappa, 2 * pi * S - tau / 2);
    return rep;
}

} // namespace cmc
