#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cmc/report.hpp"

namespace cmc {

struct BoundsReport {
    std::string name;
    std::map<std::string, double> inputs;
    ExtReal value;
    std::string formula;
    std::map<std::string, ExtReal> extras;                      // secondary outputs
    std::vector<std::pair<std::string, double>> cross_checks;   // (identity, residual)
};

inline json to_json(const BoundsReport& r) {
    json inputs = json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    json extras = json::object();
    for (const auto& [k, v] : r.extras) extras[k] = to_json_value(v);
    json cc = json::array();
    for (const auto& [k, v] : r.cross_checks) cc.push_back(json{{"identity", k}, {"residual", v}});
    return json{{"name", r.name}, {"inputs", inputs}, {"value", to_json_value(r.value)},
                {"formula", r.formula}, {"extras", extras}, {"cross_checks", cc}};
}

// ------------------------------------------------------------- chord-arc

struct ChordArc {
    double L_hat;
    double C_hat;
};

inline ChordArc chord_arc(int I, int B) {
    if (I < 0 || B < 0) throw std::invalid_argument("chord_arc: I and B must be non-negative");
    const double L = std::sqrt((3.0 * I + 2.0 * B + 3.0) / 2.0);
    const double pi = std::numbers::pi;
    return {L, 8.0 * L * L * L + 2.0 * pi * L * L - 20.0 * L - pi / 2.0};
}

/// Closed form of C_hat(I0+1, 0)/2.
inline double a_of_I0(int I0) {
    if (I0 < 0) throw std::invalid_argument("a_of_I0: I0 must be non-negative");
    const double pi = std::numbers::pi;
    return std::sqrt(6.0) * (3.0 * I0 + 1.0) * std::sqrt(I0 + 2.0) + (pi / 4.0) * (6.0 * I0 + 11.0);
}

// ------------------------------------------------------------- monotonicity

/// Radius of validity of the intrinsic monotonicity formula.
/// For a < 0 the arccoth branch is used when H0/sqrt(-a) > 1 and the radius is
/// infinite otherwise (arccoth is undefined on [0, 1]).
inline ExtReal monotonicity_radius(double a, double H0) {
    if (H0 < 0.0) throw std::invalid_argument("monotonicity_radius: H0 must be >= 0");
    if (a > 0.0) {
        const double s = std::sqrt(a);
        return ExtReal::of(std::atan2(1.0, H0 / s) / s);  // arccot on [0, inf)
    }
    if (a == 0.0) {
        if (H0 == 0.0) return ExtReal::inf();
        return ExtReal::of(1.0 / H0);
    }
    const double s = std::sqrt(-a);
    const double x = H0 / s;
    if (x <= 1.0) return ExtReal::inf();
    return ExtReal::of(std::atanh(1.0 / x) / s);
}

/// f_a(t) = (1 - t sqrt(a) cot(sqrt(a) t)) / t^2, continued to a <= 0 through coth.
inline double f_a(double a, double t) {
    if (t < 0.0) throw std::invalid_argument("f_a: t must be >= 0");
    const double sa = std::sqrt(std::fabs(a));
    if (sa * t < 1e-2) {
        const double t2 = t * t;
        return a / 3.0 + a * a * t2 / 45.0 + 2.0 * a * a * a * t2 * t2 / 945.0 + a * a * a * a * t2 * t2 * t2 / 4725.0;
    }
    const double s = sa * t;
    if (a > 0.0) {
        if (s >= std::numbers::pi) throw std::domain_error("f_a: t must be < pi/sqrt(a)");
        return (1.0 - s / std::tan(s)) / (t * t);
    }
    return (1.0 - s / std::tanh(s)) / (t * t);
}

/// Volume of the unit ball in R^n.
inline double omega_n(int n) {
    if (n < 1) throw std::invalid_argument("omega_n: n must be >= 1");
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

/// Lower bound for the volume of an intrinsic ball of radius r, valid for 0 < r <= r1.
/// r1 defaults to R0(a, H0).
inline double area_lower_bound(double r, int n, double a, double H0, std::optional<ExtReal> r1_in = std::nullopt) {
    const ExtReal R0 = monotonicity_radius(a, H0);
    const ExtReal r1 = r1_in ? ext_min(*r1_in, R0) : R0;
    if (!(r > 0.0)) throw std::domain_error("area_lower_bound: r must be > 0");
    if (r1.is_finite() && r > r1.value * (1.0 + 1e-15))
        throw std::domain_error("area_lower_bound: r exceeds r1 = min(R1, R0)");
    const double base = omega_n(n) * std::pow(r, n);
    if (a <= 0.0) return base * std::exp(-n * H0 * r);
    return base * std::exp(-n * r * (H0 + 0.5 * f_a(a, r1.value) * r));
}

// ------------------------------------------------------------- curvature estimates

/// 1 + max{A0, 2 Cs / min{eps, pi/sqrt(K0)}}; K0 = 0 means the second entry is infinite.
inline double stable_curvature_threshold(double eps, double A0, double Cs, double K0) {
    if (!(eps > 0.0)) throw std::invalid_argument("stable_curvature_threshold: eps must be > 0");
    if (Cs < 2.0 * std::numbers::pi) throw std::invalid_argument("stable_curvature_threshold: C_s must be >= 2*pi");
    if (K0 < 0.0) throw std::invalid_argument("stable_curvature_threshold: K0 must be >= 0");
    ExtReal cap = K0 == 0.0 ? ExtReal::inf() : ExtReal::of(std::numbers::pi / std::sqrt(K0));
    const double m = ext_min(ExtReal::of(eps), cap).value;
    return 1.0 + std::max(A0, 2.0 * Cs / m);
}

struct YauConstants {
    double C_A;
    double C0;
    double C_A1;
    double C1;
    double C;
};

inline YauConstants yau_area_constants(double eps0, double r2, std::optional<double> eps1 = std::nullopt) {
    if (!(eps0 > 0.0) || !(r2 > 0.0)) throw std::invalid_argument("yau_area_constants: eps0, r2 must be > 0");
    const double e1 = eps1.value_or(eps0);
    if (!(e1 > 0.0)) throw std::invalid_argument("yau_area_constants: eps1 must be > 0");
    YauConstants c{};
    c.C_A = std::min(eps0, r2 * r2 / eps0);
    c.C0 = std::min(c.C_A * eps0, c.C_A);
    c.C_A1 = std::min(e1, r2 * r2 / e1);
    c.C1 = std::min(c.C_A1 * e1, c.C_A1);
    c.C = std::min(c.C0, c.C1);
    return c;
}

/// Mesh-facing hook: a measured intrinsic ball area against 3 r^2 and, when the
/// ball reaches eps0 away from the boundary, against the linear bound C_A * radius.
inline VerificationReport yau_area_check(double area, double r, double r2, double dist_to_boundary,
                                         std::optional<double> eps0 = std::nullopt) {
    VerificationReport rep{"yau_area", {}};
    const double rmax = std::min(r2, dist_to_boundary);
    if (r > 0.0 && r <= rmax) rep.add_geq("area>=3r^2", area, 3.0 * r * r);
    else rep.add_flag("area>=3r^2 applicable", true, "r outside (0, min(r2, d(p,boundary))], not checked");
    if (eps0 && dist_to_boundary >= *eps0 && std::fabs(r - *eps0) < 1e-12) {
        const auto c = yau_area_constants(*eps0, r2);
        rep.add_geq("area>=C_A*eps0", area, c.C_A * *eps0);
    }
    return rep;
}

// ------------------------------------------------------------- extremal products

/// |A|(0) * Inj for the Scherk quotient of angle theta: 4 sqrt(2) * pi / (4 cos(theta/2)).
inline BoundsReport scherk_extremal(double theta) {
    const double pi = std::numbers::pi;
    if (!(theta > 0.0) || theta > pi / 2.0 + 1e-15)
        throw std::invalid_argument("scherk_extremal: theta must lie in (0, pi/2]");
    BoundsReport r;
    r.name = "scherk_extremal";
    r.inputs["theta"] = theta;
    const double A0 = 4.0 * std::sqrt(2.0);
    const double inj = pi / (4.0 * std::cos(theta / 2.0));
    r.value = ExtReal::of(A0 * inj);
    r.formula = "|A|(0) * Inj = 4*sqrt(2) * pi/(4 cos(theta/2))";
    r.extras["normA_at_0"] = ExtReal::of(A0);
    r.extras["injectivity_radius"] = ExtReal::of(inj);
    r.extras["evaluated_in_source_only_at_pi_over_2"] = ExtReal::of(std::fabs(theta - pi / 2.0) < 1e-15 ? 0.0 : 1.0);
    r.cross_checks.emplace_back("value - sqrt(2)*pi/cos(theta/2)", A0 * inj - std::sqrt(2.0) * pi / std::cos(theta / 2.0));
    return r;
}

/// Helicoid quotient by a vertical translation of length pi: |A| on the axis is sqrt(2), Inj = pi/2.
inline BoundsReport helicoid_extremal() {
    BoundsReport r;
    r.name = "helicoid_extremal";
    const double A0 = std::sqrt(2.0);
    const double inj = std::numbers::pi / 2.0;
    r.value = ExtReal::of(A0 * inj);
    r.formula = "|A|(axis) * Inj = sqrt(2) * pi/2";
    r.extras["normA_on_axis"] = ExtReal::of(A0);
    r.extras["injectivity_radius"] = ExtReal::of(inj);
    r.cross_checks.emplace_back("value - pi/sqrt(2)", A0 * inj - std::numbers::pi / std::sqrt(2.0));
    return r;
}

// ------------------------------------------------------------- named evaluation

/// Evaluate a named bound from a key=value argument map (used by the CLI).
inline BoundsReport evaluate_bound(const std::string& name, const std::map<std::string, double>& args) {
    auto get = [&](const std::string& k) -> double {
        auto it = args.find(k);
        if (it == args.end()) throw std::invalid_argument("missing argument '" + k + "' for " + name);
        return it->second;
    };
    auto opt = [&](const std::string& k) -> std::optional<double> {
        auto it = args.find(k);
        if (it == args.end()) return std::nullopt;
        return it->second;
    };
    auto as_int = [&](const std::string& k) -> int {
        const double v = get(k);
        if (v != std::floor(v)) throw std::invalid_argument("argument '" + k + "' must be an integer");
        return static_cast<int>(v);
    };

    BoundsReport r;
    r.name = name;
    r.inputs = args;
    if (name == "chord_arc") {
        const auto c = chord_arc(as_int("I"), as_int("B"));
        r.value = ExtReal::of(c.C_hat);
        r.extras["L_hat"] = ExtReal::of(c.L_hat);
        r.extras["C_hat"] = ExtReal::of(c.C_hat);
        r.formula = "L = sqrt((3I+2B+3)/2); C = 8L^3 + 2 pi L^2 - 20 L - pi/2";
    } else if (name == "a_of_I0") {
        const int I0 = as_int("I0");
        r.value = ExtReal::of(a_of_I0(I0));
        r.formula = "sqrt(6)(3 I0 + 1) sqrt(I0 + 2) + (pi/4)(6 I0 + 11)";
        r.cross_checks.emplace_back("a(I0) - C(I0+1,0)/2", a_of_I0(I0) - chord_arc(I0 + 1, 0).C_hat / 2.0);
    } else if (name == "monotonicity_radius") {
        const double a = get("a"), H0 = get("H0");
        r.value = monotonicity_radius(a, H0);
        r.formula = "a>0: arccot(H0/sqrt(a))/sqrt(a); a=0: 1/H0; a<0: arccoth(H0/sqrt(-a))/sqrt(-a), inf if H0/sqrt(-a) <= 1";
        if (H0 > 0.0) {
            const double d1 = monotonicity_radius(1e-8, H0).value - 1.0 / H0;
            const ExtReal m = monotonicity_radius(-1e-8, H0);
            r.cross_checks.emplace_back("R0(+1e-8,H0) - 1/H0", d1);
            if (m.is_finite()) r.cross_checks.emplace_back("R0(-1e-8,H0) - 1/H0", m.value - 1.0 / H0);
        }
    } else if (name == "f_a") {
        r.value = ExtReal::of(f_a(get("a"), get("t")));
        r.formula = "(1 - t sqrt(a) cot(sqrt(a) t)) / t^2";
    } else if (name == "omega_n") {
        r.value = ExtReal::of(omega_n(as_int("n")));
        r.formula = "pi^(n/2) / Gamma(n/2 + 1)";
    } else if (name == "area_lower_bound") {
        std::optional<ExtReal> r1;
        if (auto v = opt("r1")) r1 = ExtReal::of(*v);
        r.value = ExtReal::of(area_lower_bound(get("r"), as_int("n"), get("a"), get("H0"), r1));
        r.formula = "a<=0: w_n r^n exp(-n H0 r); a>0: w_n r^n exp(-n r (H0 + f_a(r1) r / 2))";
        r.extras["R0"] = monotonicity_radius(get("a"), get("H0"));
    } else if (name == "stable_curvature_threshold") {
        r.value = ExtReal::of(stable_curvature_threshold(get("eps"), get("A0"), get("Cs"), get("K0")));
        r.formula = "1 + max{A0, 2 Cs / min{eps, pi/sqrt(K0)}}";
    } else if (name == "yau_area_constants") {
        const auto c = yau_area_constants(get("eps0"), get("r2"), opt("eps1"));
        r.value = ExtReal::of(c.C);
        r.extras["C_A"] = ExtReal::of(c.C_A);
        r.extras["C0"] = ExtReal::of(c.C0);
        r.extras["C_A1"] = ExtReal::of(c.C_A1);
        r.extras["C1"] = ExtReal::of(c.C1);
        r.formula = "C_A = min{eps0, r2^2/eps0}; C0 = min{C_A eps0, C_A}; C = min{C0, C1}";
    } else if (name == "scherk_extremal") {
        r = scherk_extremal(get("theta"));
        r.inputs = args;
    } else if (name == "helicoid_extremal") {
        r = helicoid_extremal();
        r.inputs = args;
    } else {
        throw std::invalid_argument("unknown bound '" + name + "'");
    }
    return r;
}

inline const std::vector<std::string>& bound_names() {
    static const std::vector<std::string> names{
        "chord_arc", "a_of_I0", "monotonicity_radius", "f_a", "omega_n", "area_lower_bound",
        "stable_curvature_threshold", "yau_area_constants", "scherk_extremal", "helicoid_extremal"};
    return names;
}

} // namespace cmc
