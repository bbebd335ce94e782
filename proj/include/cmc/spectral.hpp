#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "cmc/mesh.hpp"
#include "cmc/report.hpp"

namespace cmc {

using SpMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;

class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Jacobi operator pieces on the interior vertices (Dirichlet on every boundary loop).
struct OperatorPair {
    SpMat stiffness;
    SpMat potential_mass;
    VecX mass;                     // lumped, diagonal
    std::vector<int> dof_vertex;   // dof -> vertex
    std::vector<int> vertex_dof;   // vertex -> dof or -1
    int n() const { return static_cast<int>(dof_vertex.size()); }
};

inline OperatorPair assemble_jacobi(const SurfaceMesh& m) {
    OperatorPair op;
    const auto bnd = boundary_mask(m);
    op.vertex_dof.assign(m.vertices.size(), -1);
    for (int v = 0; v < m.n_vertices(); ++v)
        if (!bnd[static_cast<size_t>(v)]) {
            op.vertex_dof[static_cast<size_t>(v)] = op.n();
            op.dof_vertex.push_back(v);
        }
    if (op.n() == 0) throw MeshError("assemble_jacobi: mesh has no interior vertex");
    const int n = op.n();
    std::vector<Eigen::Triplet<double>> trip;
    op.mass = VecX::Zero(n);
    for (int t = 0; t < m.n_triangles(); ++t) {
        const Tri& T = m.triangles[static_cast<size_t>(t)];
        const double area = triangle_area(m, t);
        for (int k = 0; k < 3; ++k) {
            const int d = op.vertex_dof[static_cast<size_t>(T[k])];
            if (d >= 0) op.mass(d) += area / 3.0;
        }
        // cot weight of the edge opposite each corner
        for (int k = 0; k < 3; ++k) {
            const int o = T[k], a = T[(k + 1) % 3], b = T[(k + 2) % 3];
            const Vec3 u = edge_vec(m, o, a), w = edge_vec(m, o, b);
            const double cot = u.dot(w) / u.cross(w).norm();
            const double c = 0.5 * cot;
            const int da = op.vertex_dof[static_cast<size_t>(a)], db = op.vertex_dof[static_cast<size_t>(b)];
            if (da >= 0) trip.emplace_back(da, da, c);
            if (db >= 0) trip.emplace_back(db, db, c);
            if (da >= 0 && db >= 0) {
                trip.emplace_back(da, db, -c);
                trip.emplace_back(db, da, -c);
            }
        }
    }
    op.stiffness.resize(n, n);
    op.stiffness.setFromTriplets(trip.begin(), trip.end());
    std::vector<Eigen::Triplet<double>> pt;
    for (int d = 0; d < n; ++d) pt.emplace_back(d, d, op.mass(d) * m.normA2[static_cast<size_t>(op.dof_vertex[static_cast<size_t>(d)])]);
    op.potential_mass.resize(n, n);
    op.potential_mass.setFromTriplets(pt.begin(), pt.end());
    return op;
}

/// Q(phi) = int |grad phi|^2 - int |A|^2 phi^2 for a dof vector.
inline double quadratic_form(const OperatorPair& op, const VecX& phi) {
    return phi.dot(op.stiffness * phi) - phi.dot(op.potential_mass * phi);
}

inline double symmetry_residual(const SpMat& A) {
    SpMat D = SpMat(A.transpose()) - A;
    return D.norm();
}

struct SpectralResult {
    std::vector<double> eigenvalues;  // ascending
    int index = 0;                    // eigenvalues below -threshold
    int inertia_index = 0;            // the same count from an LDL^T factorization
    double threshold = 0.0;
    int k_requested = 1;
    bool saturated = false;           // every computed eigenvalue was negative
    int iterations = 0;
    int restarts = 0;
    json resolution_meta = json::object();
};

inline json to_json(const SpectralResult& r) {
    return json{{"eigenvalues", r.eigenvalues}, {"index", r.index}, {"inertia_index", r.inertia_index},
                {"threshold", r.threshold}, {"k_requested", r.k_requested}, {"saturated", r.saturated},
                {"iterations", r.iterations}, {"restarts", r.restarts}, {"meta", r.resolution_meta}};
}

struct EigenOptions {
    int k = 6;
    double threshold_scale = 1e-3;                 // threshold = scale * median edge^2
    std::optional<double> threshold;               // overrides the scale when set
    int max_lanczos_steps = 240;                   // Krylov dimension per sweep
    int max_sweeps = 40;                           // restarts before NonConvergence
    double tol = 1e-10;                            // relative Ritz residual
};

namespace detail {

// deterministic start vectors: sweep 0 is all-ones with a small perturbation
inline VecX start_vector(int n, int sweep) {
    VecX v(n);
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1);
        if (sweep == 0) v(i) = 1.0 + 1e-3 * std::sin(0.7548776662466927 * x);
        else v(i) = std::sin(x * (0.5698402909980532 + 0.3247179572447460 * sweep)) + 0.5 * std::cos(x * 1.3247179572 * sweep);
    }
    return v.normalized();
}

// Largest eigenpairs of the symmetric operator T (given as a callback) by Lanczos with full
// reorthogonalisation, locking converged vectors and restarting until a fresh sweep finds
// nothing above the k-th locked value.
inline void lanczos_largest(const std::function<VecX(const VecX&)>& T, int n, int k, const EigenOptions& opt,
                            std::vector<double>& vals, std::vector<VecX>& vecs, int& iterations, int& restarts) {
    vals.clear();
    vecs.clear();
    iterations = 0;
    restarts = 0;
    int quiet_sweeps = 0;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const int locked = static_cast<int>(vecs.size());
        const int room = n - locked;
        if (room <= 0) break;
        const int m = std::min(room, opt.max_lanczos_steps);
        auto deflate = [&](VecX& x) {
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& y : vecs) x -= y.dot(x) * y;
        };
        VecX q = start_vector(n, sweep);
        deflate(q);
        if (q.norm() < 1e-12) continue;
        q.normalize();
        std::vector<VecX> Q{q};
        std::vector<double> alpha, beta;
        bool breakdown = false;
        for (int j = 0; j < m; ++j) {
            VecX w = T(Q[static_cast<size_t>(j)]);
            ++iterations;
            deflate(w);
            const double a = Q[static_cast<size_t>(j)].dot(w);
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& qq : Q) w -= qq.dot(w) * qq;
            const double b = w.norm();
            if (j + 1 == m) { beta.push_back(b); break; }
            if (b < 1e-14 * std::max(1.0, std::fabs(a))) { beta.push_back(0.0); breakdown = true; break; }
            beta.push_back(b);
            Q.push_back(w / b);
        }
        const int s = static_cast<int>(alpha.size());
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(s, s);
        for (int i = 0; i < s; ++i) {
            H(i, i) = alpha[static_cast<size_t>(i)];
            if (i + 1 < s) H(i, i + 1) = H(i + 1, i) = beta[static_cast<size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const double bnext = breakdown ? 0.0 : beta.back();
        double scale = 0;
        for (int i = 0; i < s; ++i) scale = std::max(scale, std::fabs(es.eigenvalues()(i)));
        for (double v : vals) scale = std::max(scale, std::fabs(v));
        // walk Ritz values from the top; lock the converged prefix
        int accepted = 0;
        for (int i = s - 1; i >= 0; --i) {
            const double resid = std::fabs(bnext * es.eigenvectors()(s - 1, i));
            if (resid > opt.tol * std::max(scale, 1e-300)) break;
            const double mu = es.eigenvalues()(i);
            // stop once past the k best found so far
            if (static_cast<int>(vals.size()) >= k && mu <= *std::min_element(vals.begin(), vals.end())) break;
            VecX y = VecX::Zero(n);
            for (int r = 0; r < s; ++r) y += es.eigenvectors()(r, i) * Q[static_cast<size_t>(r)];
            deflate(y);
            const double yn = y.norm();
            if (yn < 1e-8) break;
            vecs.push_back(y / yn);
            vals.push_back(mu);
            ++accepted;
            if (accepted >= k) break;
        }
        if (sweep > 0) ++restarts;
        if (static_cast<int>(vals.size()) >= k) {
            if (accepted == 0) ++quiet_sweeps;
            else quiet_sweeps = 0;
            if (quiet_sweeps >= 1) break;
        }
    }
    if (static_cast<int>(vals.size()) < std::min(k, n))
        throw NonConvergence("lanczos: only " + std::to_string(vals.size()) + " of " + std::to_string(k) +
                             " eigenpairs converged after " + std::to_string(opt.max_sweeps) + " sweeps");
    // keep the k largest, sorted descending
    std::vector<int> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[static_cast<size_t>(a)] > vals[static_cast<size_t>(b)]; });
    std::vector<double> v2;
    std::vector<VecX> x2;
    for (int i = 0; i < std::min<int>(k, static_cast<int>(order.size())); ++i) {
        v2.push_back(vals[static_cast<size_t>(order[static_cast<size_t>(i)])]);
        x2.push_back(vecs[static_cast<size_t>(order[static_cast<size_t>(i)])]);
    }
    vals = v2;
    vecs = x2;
}

// Number of eigenvalues of (A, M) below -thr, by Sylvester's law on A + thr M.
inline int inertia_below(const SpMat& A, const VecX& mass, double thr) {
    SpMat B = A;
    for (int i = 0; i < B.rows(); ++i) B.coeffRef(i, i) += thr * mass(i);
    Eigen::SimplicialLDLT<SpMat> ldlt(B);
    if (ldlt.info() != Eigen::Success) throw NonConvergence("inertia: LDL^T factorization failed");
    const VecX D = ldlt.vectorD();
    int neg = 0;
    for (int i = 0; i < D.size(); ++i)
        if (D(i) < 0) ++neg;
    return neg;
}

inline SpectralResult solve_generalized(const SpMat& A, const VecX& mass, double max_potential, double thr,
                                        const EigenOptions& opt) {
    const int n = static_cast<int>(A.rows());
    SpectralResult r;
    r.threshold = thr;
    r.k_requested = opt.k;
    // A + pmax M is positive definite (stiffness is); a smaller shift that still factors
    // spreads the low end of the spectrum and speeds up Lanczos. Take twice the smallest
    // dyadic fraction of pmax that factors, so the shift keeps a margin below -lambda_1.
    const double top = std::max(max_potential, 0.0) + 1e-12;
    auto shifted = [&](double s) {
        SpMat B = A;
        for (int i = 0; i < n; ++i) B.coeffRef(i, i) += s * mass(i);
        return B;
    };
    double sigma = top;
    for (int j = 10; j >= 1; --j) {
        const double s = top * std::ldexp(1.0, -j);
        Eigen::SimplicialLLT<SpMat> probe(shifted(s));
        if (probe.info() == Eigen::Success) {
            sigma = std::min(top, 2 * s);
            break;
        }
    }
    Eigen::SimplicialLLT<SpMat> llt(shifted(sigma));
    if (llt.info() != Eigen::Success) throw NonConvergence("shift-invert: factorization of A + sigma M failed");
    const VecX msq = mass.cwiseSqrt();
    auto T = [&](const VecX& y) -> VecX {
        VecX x = llt.solve(msq.cwiseProduct(y));
        return msq.cwiseProduct(x);
    };
    const int k = std::min(opt.k, n);
    std::vector<double> mu;
    std::vector<VecX> vecs;
    lanczos_largest(T, n, k, opt, mu, vecs, r.iterations, r.restarts);
    for (double m : mu) r.eigenvalues.push_back(1.0 / m - sigma);
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end());
    for (double l : r.eigenvalues)
        if (l < -thr) ++r.index;
    r.saturated = !r.eigenvalues.empty() && r.eigenvalues.back() < -thr && k < n;
    r.inertia_index = inertia_below(A, mass, thr);
    r.resolution_meta = json{{"dofs", n}, {"sigma", sigma}, {"solver", "shift-invert lanczos"}};
    return r;
}

} // namespace detail

inline double default_threshold(const SurfaceMesh& m, const EigenOptions& opt) {
    if (opt.threshold) {
        if (!(*opt.threshold > 0)) throw std::invalid_argument("threshold must be positive");
        return *opt.threshold;
    }
    const double h = median_edge_length(m);
    return opt.threshold_scale * h * h;
}

/// Lowest k eigenvalues of the Jacobi form and the count below -threshold.
inline SpectralResult morse_index(const SurfaceMesh& m, const EigenOptions& opt = {}) {
    if (opt.k < 1) throw std::invalid_argument("morse_index: k must be >= 1");
    const OperatorPair op = assemble_jacobi(m);
    const SpMat A = op.stiffness - op.potential_mass;
    double pmax = 0;
    for (int d = 0; d < op.n(); ++d) pmax = std::max(pmax, m.normA2[static_cast<size_t>(op.dof_vertex[static_cast<size_t>(d)])]);
    SpectralResult r = detail::solve_generalized(A, op.mass, pmax, default_threshold(m, opt), opt);
    r.resolution_meta["vertices"] = m.n_vertices();
    r.resolution_meta["triangles"] = m.n_triangles();
    if (m.meta.contains("resolution")) r.resolution_meta["resolution"] = m.meta["resolution"];
    return r;
}

/// Same problem restricted to functions with phi o tau = -phi.
inline SpectralResult morse_index_one_sided(const SurfaceMesh& m, const EigenOptions& opt = {}) {
    if (opt.k < 1) throw std::invalid_argument("morse_index_one_sided: k must be >= 1");
    if (!m.involution) throw std::invalid_argument("morse_index_one_sided: mesh has no involution");
    for (const auto& issue : mesh_issues(m))
        if (issue.find("involution") != std::string::npos) throw std::invalid_argument("morse_index_one_sided: " + issue);
    const auto& tau = *m.involution;
    const OperatorPair op = assemble_jacobi(m);
    const SpMat A = op.stiffness - op.potential_mass;
    // basis phi_i - phi_tau(i), one per pair of interior dofs
    std::vector<Eigen::Triplet<double>> pt;
    int cols = 0;
    double pmax = 0;
    for (int d = 0; d < op.n(); ++d) {
        const int v = op.dof_vertex[static_cast<size_t>(d)];
        const int w = tau[static_cast<size_t>(v)];
        const int dw = op.vertex_dof[static_cast<size_t>(w)];
        if (dw < 0) throw std::invalid_argument("morse_index_one_sided: involution does not preserve the boundary");
        if (v < w) {
            pt.emplace_back(d, cols, 1.0);
            pt.emplace_back(dw, cols, -1.0);
            ++cols;
            pmax = std::max(pmax, m.normA2[static_cast<size_t>(v)]);
            pmax = std::max(pmax, m.normA2[static_cast<size_t>(w)]);
        }
    }
    if (cols == 0) throw MeshError("morse_index_one_sided: no anti-invariant dofs");
    SpMat P(op.n(), cols);
    P.setFromTriplets(pt.begin(), pt.end());
    const SpMat Ar = SpMat(P.transpose() * A * P);
    const VecX Mr = P.transpose() * op.mass.asDiagonal() * P * VecX::Ones(cols);  // P^T M P is diagonal
    SpectralResult r = detail::solve_generalized(Ar, Mr, pmax, default_threshold(m, opt), opt);
    r.resolution_meta["vertices"] = m.n_vertices();
    r.resolution_meta["subspace"] = "anti-invariant";
    if (m.meta.contains("resolution")) r.resolution_meta["resolution"] = m.meta["resolution"];
    return r;
}

struct ConvergenceRow {
    json resolution;
    int index = 0;
    double lambda_min = 0.0;
    SpectralResult result;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool stabilized = false;  // last two indices agree
};

inline json to_json(const ConvergenceTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"resolution", r.resolution}, {"index", r.index}, {"lambda_min", r.lambda_min},
                        {"inertia_index", r.result.inertia_index}});
    return json{{"rows", rows}, {"stabilized", t.stabilized}};
}

inline ConvergenceTable index_convergence(const WeierstrassData& data, const std::vector<ParamDomain>& domains,
                                          const EigenOptions& opt = {}, bool one_sided = false) {
    if (domains.size() < 2) throw std::invalid_argument("index_convergence: need >= 2 resolutions");
    ConvergenceTable t;
    for (const auto& d : domains) {
        const SurfaceMesh m = build_mesh(data, d);
        ConvergenceRow row;
        row.result = one_sided ? morse_index_one_sided(m, opt) : morse_index(m, opt);
        row.index = row.result.index;
        row.lambda_min = row.result.eigenvalues.front();
        row.resolution = {d.resolution[0], d.resolution[1]};
        t.rows.push_back(std::move(row));
    }
    t.stabilized = t.rows[t.rows.size() - 1].index == t.rows[t.rows.size() - 2].index;
    return t;
}

} // namespace cmc
