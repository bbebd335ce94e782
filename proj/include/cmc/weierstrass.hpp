#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cmc {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

enum class Family { plane, catenoid, enneper, helicoid, scherk_doubly_periodic };

inline std::string to_string(Family f) {
    switch (f) {
    case Family::plane: return "plane";
    case Family::catenoid: return "catenoid";
    case Family::enneper: return "enneper";
    case Family::helicoid: return "helicoid";
    case Family::scherk_doubly_periodic: return "scherk_doubly_periodic";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "plane") return Family::plane;
    if (s == "catenoid") return Family::catenoid;
    if (s == "enneper") return Family::enneper;
    if (s == "helicoid") return Family::helicoid;
    if (s == "scherk" || s == "scherk_doubly_periodic") return Family::scherk_doubly_periodic;
    throw std::invalid_argument("unknown family '" + s + "'");
}

enum class DomainShape { annulus, rectangle, disk, sphere };

inline std::string to_string(DomainShape s) {
    switch (s) {
    case DomainShape::annulus: return "annulus";
    case DomainShape::rectangle: return "rectangle";
    case DomainShape::disk: return "disk";
    case DomainShape::sphere: return "sphere";
    }
    return "?";
}

inline DomainShape shape_from_string(const std::string& s) {
    if (s == "annulus") return DomainShape::annulus;
    if (s == "rectangle") return DomainShape::rectangle;
    if (s == "disk") return DomainShape::disk;
    if (s == "sphere") return DomainShape::sphere;
    throw std::invalid_argument("unknown domain shape '" + s + "'");
}

/// Parameter domain in the conformal coordinate.
///   annulus:   bounds {r_in, r_out}, radial nodes uniform in log r, res {n_radial, n_angular}
///   disk:      bounds {R} or {R, grading}, res {n_rings, max nodes per ring}
///   rectangle: bounds {u0, u1, v0, v1}, res {n_u, n_v}; for helicoid the coordinate is w with z = e^w
///   sphere:    bounds {rho}, res {n, n}; octahedral grid on the Gauss sphere with chordal
///              rho-neighbourhoods of the poles of the data removed (Scherk only)
struct ParamDomain {
    DomainShape shape = DomainShape::disk;
    std::vector<double> bounds{1.0};
    std::array<int, 2> resolution{16, 96};
};

inline void require_valid(const ParamDomain& d) {
    const auto& b = d.bounds;
    if (d.resolution[0] < 4 || d.resolution[1] < 4) throw std::invalid_argument("domain resolution must be >= 4");
    switch (d.shape) {
    case DomainShape::annulus:
        if (b.size() != 2 || !(b[0] > 0 && b[0] < b[1])) throw std::invalid_argument("annulus bounds need 0 < r_in < r_out");
        break;
    case DomainShape::disk:
        if (b.empty() || b.size() > 2 || !(b[0] > 0)) throw std::invalid_argument("disk bounds need R > 0");
        if (b.size() == 2 && b[1] < 0) throw std::invalid_argument("disk grading must be >= 0");
        break;
    case DomainShape::rectangle:
        if (b.size() != 4 || !(b[0] < b[1]) || !(b[2] < b[3])) throw std::invalid_argument("rectangle bounds need u0 < u1, v0 < v1");
        break;
    case DomainShape::sphere:
        if (b.size() != 1 || !(b[0] > 0 && b[0] < 0.5)) throw std::invalid_argument("sphere bounds need 0 < rho < 0.5");
        break;
    }
}

/// Pointwise data of the immersion. Convention: X = Re int (1 - g^2, i(1 + g^2), 2g) f dz.
struct SurfacePoint {
    Vec3 X;
    Vec3 N;
    double K = 0.0;
    double normA2 = 0.0;
};

struct WeierstrassData {
    Family family = Family::plane;
    std::map<std::string, double> parameters;
    ParamDomain domain;
    std::string gauss_map;
    std::string height_differential;

    double theta() const {
        auto it = parameters.find("theta");
        return it == parameters.end() ? std::numbers::pi / 2 : it->second;
    }
    bool minimal() const { return true; }
};

inline Vec3 gauss_normal(cplx g) {
    const double a = std::norm(g);
    return Vec3(2 * g.real(), 2 * g.imag(), a - 1) / (1 + a);
}

/// K = -(2|g'| / (|f| (1 + |g|^2)^2))^2
inline double gauss_curvature(cplx g, cplx dg, cplx f) {
    if (std::abs(dg) == 0.0) return 0.0;
    const double q = 2 * std::abs(dg) / (std::abs(f) * std::pow(1 + std::norm(g), 2));
    return -q * q;
}

namespace detail {

struct ScherkTerms {
    std::array<cplx, 4> poles;
    std::array<std::array<cplx, 3>, 4> residues;
};

inline ScherkTerms scherk_terms(double theta) {
    ScherkTerms t;
    const cplx a = std::polar(1.0, theta / 2);
    t.poles = {a, -a, std::conj(a), -std::conj(a)};
    const cplx I(0, 1);
    for (int k = 0; k < 4; ++k) {
        const cplx p = t.poles[k];
        const cplx dP = 4.0 * p * p * p - 4.0 * std::cos(theta) * p;
        const cplx s = I / (2.0 * dP);
        t.residues[k] = {(1.0 - p * p) * s, I * (1.0 + p * p) * s, 2.0 * p * s};
    }
    return t;
}

} // namespace detail

/// Fixed closed-form recipe for a family.
inline WeierstrassData classical_surface(Family family, std::map<std::string, double> parameters = {}) {
    WeierstrassData d;
    d.family = family;
    d.parameters = std::move(parameters);
    switch (family) {
    case Family::plane:
        d.gauss_map = "g = 0";
        d.height_differential = "f dz = dz";
        d.domain = {DomainShape::disk, {1.0}, {16, 96}};
        break;
    case Family::catenoid:
        d.gauss_map = "g = z";
        d.height_differential = "f dz = dz / (2 z^2)";
        d.domain = {DomainShape::annulus, {std::exp(-3.0), std::exp(3.0)}, {60, 64}};
        break;
    case Family::enneper:
        d.gauss_map = "g = z";
        d.height_differential = "f dz = dz";
        d.domain = {DomainShape::disk, {3.0}, {30, 192}};
        break;
    case Family::helicoid:
        d.gauss_map = "g = z = e^w";
        d.height_differential = "f dz = i dz / (2 z^2)";
        d.domain = {DomainShape::rectangle, {-2.0, 2.0, 0.0, std::numbers::pi}, {40, 40}};
        break;
    case Family::scherk_doubly_periodic: {
        if (!d.parameters.count("theta")) d.parameters["theta"] = std::numbers::pi / 2;
        const double th = d.parameters["theta"];
        if (!(th > 0 && th <= std::numbers::pi / 2)) throw std::invalid_argument("scherk theta must lie in (0, pi/2]");
        d.gauss_map = "g = z";
        d.height_differential = "f dz = i dz / (2 (z^4 - 2 cos(theta) z^2 + 1))";
        d.domain = {DomainShape::sphere, {0.07}, {64, 64}};
        break;
    }
    }
    for (const auto& [k, v] : d.parameters)
        if (!(family == Family::scherk_doubly_periodic && k == "theta"))
            throw std::invalid_argument("unexpected parameter '" + k + "' for " + to_string(family));
    return d;
}

inline WeierstrassData classical_surface(const std::string& family, std::map<std::string, double> parameters = {}) {
    return classical_surface(family_from_string(family), std::move(parameters));
}

/// Poles of the height differential (points the domain must avoid).
inline std::vector<cplx> poles(const WeierstrassData& d) {
    switch (d.family) {
    case Family::catenoid:
    case Family::helicoid:
        return {cplx(0, 0)};  // and infinity
    case Family::scherk_doubly_periodic: {
        auto t = detail::scherk_terms(d.theta());
        return {t.poles.begin(), t.poles.end()};
    }
    default:
        return {};
    }
}

/// Generators of the translation lattice of the Scherk surface (x3 period is zero).
inline std::vector<Vec3> scherk_period_generators(double theta) {
    const auto t = detail::scherk_terms(theta);
    const cplx twopi_i(0, 2 * std::numbers::pi);
    std::vector<Vec3> out;
    for (int k = 0; k < 4; ++k)
        out.emplace_back((twopi_i * t.residues[k][0]).real(), (twopi_i * t.residues[k][1]).real(),
                         (twopi_i * t.residues[k][2]).real());
    return out;
}

/// Evaluate position, normal and curvature at conformal coordinate z.
/// For the helicoid the argument is w (z = e^w). For Scherk, `at_infinity_w` lets callers
/// pass w = 1/z near z = infinity.
inline SurfacePoint evaluate(const WeierstrassData& d, cplx z, bool at_infinity_w = false) {
    SurfacePoint p;
    const cplx I(0, 1);
    switch (d.family) {
    case Family::plane:
        p.X = Vec3(z.real(), -z.imag(), 0.0);
        p.N = gauss_normal(0.0);
        p.K = 0.0;
        break;
    case Family::catenoid: {
        if (std::abs(z) == 0.0) throw std::domain_error("catenoid: z = 0 is a pole");
        const cplx a = -1.0 / (2.0 * z), b = z / 2.0;
        p.X = Vec3((a - b).real(), (I * (a + b)).real(), std::log(std::abs(z)));
        p.N = gauss_normal(z);
        p.K = gauss_curvature(z, 1.0, 1.0 / (2.0 * z * z));
        break;
    }
    case Family::enneper: {
        const cplx z3 = z * z * z;
        p.X = Vec3((z - z3 / 3.0).real(), (I * (z + z3 / 3.0)).real(), (z * z).real());
        p.N = gauss_normal(z);
        p.K = gauss_curvature(z, 1.0, 1.0);
        break;
    }
    case Family::helicoid: {
        const cplx w = z;
        const cplx zz = std::exp(w);
        const cplx a = -1.0 / (2.0 * zz), b = zz / 2.0;
        // conjugate catenoid: X = Re(i * catenoid primitive), height Re(i w) = -Im w
        p.X = Vec3((I * (a - b)).real(), (I * I * (a + b)).real(), (I * w).real());
        p.N = gauss_normal(zz);
        p.K = gauss_curvature(zz, 1.0, I / (2.0 * zz * zz));
        break;
    }
    case Family::scherk_doubly_periodic: {
        const auto t = detail::scherk_terms(d.theta());
        const double th = d.theta();
        cplx zz = z;
        bool far = at_infinity_w;
        if (!far && std::abs(z) > 1.0) {
            zz = 1.0 / z;
            far = true;
        }
        std::array<cplx, 3> acc{0, 0, 0};
        for (int k = 0; k < 4; ++k) {
            const cplx p0 = t.poles[k];
            // residues sum to zero, so far out log(z - p) may be replaced by log(1 - p/z);
            // the two charts then differ by a lattice vector
            cplx L;
            if (far) {
                L = std::log(1.0 - p0 * zz);
            } else {
                if (std::abs(zz - p0) == 0.0) throw std::domain_error("scherk: evaluation at a pole");
                L = std::log(zz - p0);
            }
            for (int c = 0; c < 3; ++c) acc[c] += t.residues[k][c] * L;
        }
        p.X = Vec3(acc[0].real(), acc[1].real(), acc[2].real());
        if (far) {
            // g = 1/w; curvature is symmetric under z -> 1/z
            const double a = std::norm(zz);
            const cplx Pw = 1.0 - 2.0 * std::cos(th) * zz * zz + zz * zz * zz * zz;
            p.K = -16.0 * std::norm(Pw) / std::pow(1 + a, 4);
            if (std::abs(zz) == 0.0) p.N = Vec3(0, 0, 1);
            else p.N = gauss_normal(1.0 / zz);
        } else {
            const cplx P = zz * zz * zz * zz - 2.0 * std::cos(th) * zz * zz + 1.0;
            p.K = -16.0 * std::norm(P) / std::pow(1 + std::norm(zz), 4);
            p.N = gauss_normal(zz);
        }
        break;
    }
    }
    p.normA2 = -2.0 * p.K;
    return p;
}

/// Height differential form Phi = (1 - g^2, i(1 + g^2), 2g) f at z, for derivative checks.
inline std::array<cplx, 3> phi(const WeierstrassData& d, cplx z) {
    const cplx I(0, 1);
    cplx g = 0, f = 1;
    switch (d.family) {
    case Family::plane: g = 0; f = 1; break;
    case Family::catenoid: g = z; f = 1.0 / (2.0 * z * z); break;
    case Family::enneper: g = z; f = 1; break;
    case Family::helicoid: {
        // derivative in w: f_w = f(z) z
        const cplx zz = std::exp(z);
        g = zz;
        f = I / (2.0 * zz * zz) * zz;
        break;
    }
    case Family::scherk_doubly_periodic: {
        const double th = d.theta();
        g = z;
        f = I / (2.0 * (z * z * z * z - 2.0 * std::cos(th) * z * z + 1.0));
        break;
    }
    }
    return {(1.0 - g * g) * f, I * (1.0 + g * g) * f, 2.0 * g * f};
}

} // namespace cmc
