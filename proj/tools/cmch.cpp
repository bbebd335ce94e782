// cmch: command-line front end for the cmc library.
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error, 3 solver non-convergence.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmc/acceptance.hpp"
#include "cmc/bounds.hpp"
#include "cmc/hierarchy.hpp"
#include "cmc/hierarchy_random.hpp"
#include "cmc/invariants.hpp"
#include "cmc/mesh.hpp"
#include "cmc/multigraph.hpp"
#include "cmc/report.hpp"
#include "cmc/spectral.hpp"
#include "cmc/weierstrass.hpp"

#ifndef CMCH_VERSION
#define CMCH_VERSION "0.0.0"
#endif

namespace {

using cmc::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckFailed {};

struct Output {
    std::string path;
    std::string format = "json";
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// "I=1,B=0" -> {I: 1, B: 0}
std::map<std::string, double> parse_args(const std::string& s) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + item + "'");
        try {
            size_t used = 0;
            const std::string val = item.substr(eq + 1);
            out[item.substr(0, eq)] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw ConfigError("not a number in '" + item + "'");
        }
    }
    return out;
}

// Flat key=value file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

// Config entries become "--key value" tokens appended after the command line,
// skipped when the flag was given explicitly (flags win).
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (size_t i = 0; i < args.size(); ++i)
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    if (path.empty()) return args;
    for (const auto& [k, v] : read_config_file(path)) {
        const std::string flag = "--" + k;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (!given) {
            args.push_back(flag);
            args.push_back(v);
        }
    }
    return args;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Report envelope: tool, version, resolved config, result. Timing goes to a sidecar.
void emit(const Output& out, const json& config, const json& result, bool pass, double seconds) {
    const json report{{"tool", "cmch"}, {"version", CMCH_VERSION}, {"config", config}, {"pass", pass}, {"result", result}};
    const std::string text = out.format == "csv" ? cmc::to_csv(report) : cmc::dump_json(report);
    if (out.path.empty()) {
        std::cout << text;
    } else {
        cmc::atomic_write(out.path, text);
        const json meta{{"timestamp", utc_now()}, {"seconds", seconds}};
        cmc::atomic_write(out.path + ".meta.json", cmc::dump_json(meta));
    }
    if (!pass) throw CheckFailed{};
}

void add_output(CLI::App* sub, Output& out) {
    sub->add_option("-o,--out", out.path, "report path (stdout if omitted)");
    sub->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

cmc::SurfaceMesh load_mesh(const std::string& path) {
    try {
        const json j = read_json_file(path);
        return cmc::mesh_from_json(j.contains("result") && j["result"].contains("mesh") ? j["result"]["mesh"] : j);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-index minimal surface toolkit"};
    app.set_version_flag("--version", CMCH_VERSION);
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value file merged under the flags");
    Output out;
    const auto t0 = std::chrono::steady_clock::now();

    // surface gen
    auto* surface = app.add_subcommand("surface", "surface generation")->require_subcommand(1);
    auto* gen = surface->add_subcommand("gen", "mesh a classical surface");
    std::string family, shape, params;
    std::vector<double> bounds;
    std::vector<int> res;
    gen->add_option("family", family, "plane, catenoid, enneper, helicoid or scherk")->required();
    gen->add_option("--params", params, "k=v,... (scherk: theta)");
    gen->add_option("--shape", shape, "annulus, disk, rectangle or sphere");
    gen->add_option("--bounds", bounds, "domain bounds")->delimiter(',');
    gen->add_option("--res", res, "two resolution numbers")->delimiter(',')->expected(2);
    add_output(gen, out);

    // index
    auto* index = app.add_subcommand("index", "Morse index of the Jacobi operator");
    std::string mesh_path;
    cmc::EigenOptions eopt;
    double threshold = 0;
    bool one_sided = false;
    index->add_option("mesh", mesh_path, "mesh JSON")->required();
    index->add_option("--k", eopt.k, "eigenpairs requested");
    index->add_option("--threshold", threshold, "absolute threshold (default: scale * median edge^2)");
    index->add_option("--threshold-scale", eopt.threshold_scale);
    index->add_option("--max-sweeps", eopt.max_sweeps);
    index->add_option("--tol", eopt.tol);
    index->add_flag("--one-sided", one_sided, "restrict to functions odd under the mesh involution");
    add_output(index, out);

    // invariants
    auto* inv = app.add_subcommand("invariants", "index bounds and parity for a topology profile");
    std::string profile_path;
    bool nonorientable = false;
    int genus = 0;
    std::vector<int> ends, branch;
    std::optional<double> measured;
    inv->add_option("--profile", profile_path, "profile JSON");
    inv->add_flag("--nonorientable", nonorientable);
    inv->add_option("--genus", genus);
    inv->add_option("--ends", ends, "end multiplicities")->delimiter(',');
    inv->add_option("--branch", branch, "branch orders")->delimiter(',');
    inv->add_option("--total-curvature", measured, "measured total curvature for the residual");
    add_output(inv, out);

    // hierarchy check / fuzz
    auto* hier = app.add_subcommand("hierarchy", "hierarchy arithmetic")->require_subcommand(1);
    auto* hcheck = hier->add_subcommand("check", "validate a hierarchy and evaluate its inequalities");
    std::string hier_path;
    hcheck->add_option("file", hier_path, "hierarchy JSON")->required();
    add_output(hcheck, out);
    auto* hfuzz = hier->add_subcommand("fuzz", "seeded random hierarchies");
    std::uint64_t seed = 0;
    int count = 1000;
    cmc::HierarchyCaps caps;
    hfuzz->add_option("--seed", seed);
    hfuzz->add_option("--count", count)->check(CLI::PositiveNumber);
    hfuzz->add_option("--max-depth", caps.max_depth);
    hfuzz->add_option("--max-children", caps.max_children);
    hfuzz->add_option("--max-index", caps.max_index);
    add_output(hfuzz, out);

    // bounds eval
    auto* bnd = app.add_subcommand("bounds", "closed-form constants")->require_subcommand(1);
    auto* beval = bnd->add_subcommand("eval", "evaluate a named bound");
    std::string bound_name, bound_args;
    beval->add_option("name", bound_name)->required()->check(CLI::IsMember(cmc::bound_names()));
    beval->add_option("--args", bound_args, "k=v,...");
    add_output(beval, out);

    // multigraph check
    auto* mg = app.add_subcommand("multigraph", "multi-graph annulus checks")->require_subcommand(1);
    auto* mcheck = mg->add_subcommand("check", "hypotheses on [r1, r2] and conclusions at r2");
    double r1 = 0, r2 = 0, alpha = 0.05, l0 = 0, tau = std::numbers::pi / 10;
    mcheck->add_option("mesh", mesh_path, "mesh JSON")->required();
    mcheck->add_option("--r1", r1)->required();
    mcheck->add_option("--r2", r2)->required();
    mcheck->add_option("--alpha", alpha);
    mcheck->add_option("--l0", l0)->required();
    mcheck->add_option("--tau", tau);
    add_output(mcheck, out);

    // acceptance
    auto* acc = app.add_subcommand("acceptance", "acceptance matrix");
    std::string suite = "primary";
    cmc::AcceptanceConfig acfg;
    acc->add_option("--suite", suite)->check(CLI::IsMember({"primary"}));
    acc->add_option("--seed", acfg.seed);
    acc->add_option("--fuzz-count", acfg.fuzz_count)->check(CLI::PositiveNumber);
    add_output(acc, out);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*gen) {
            auto data = cmc::classical_surface(family == "scherk" ? "scherk_doubly_periodic" : family,
                                               [&] {
                                                   std::map<std::string, double> p;
                                                   for (const auto& [k, v] : parse_args(params)) p[k] = v;
                                                   return p;
                                               }());
            cmc::ParamDomain dom = data.domain;
            if (!shape.empty()) dom.shape = cmc::shape_from_string(shape);
            if (!bounds.empty()) dom.bounds = bounds;
            if (!res.empty()) dom.resolution = {res[0], res[1]};
            const cmc::SurfaceMesh m = cmc::build_mesh(data, dom);
            const auto issues = cmc::mesh_issues(m);
            const json config{{"command", "surface gen"}, {"family", cmc::to_string(data.family)}, {"parameters", data.parameters},
                              {"domain", {{"shape", cmc::to_string(dom.shape)}, {"bounds", dom.bounds}, {"resolution", dom.resolution}}}};
            emit(out, config, json{{"issues", issues}, {"total_curvature", cmc::total_curvature(m)}, {"mesh", cmc::to_json(m)}},
                 issues.empty(), elapsed(t0));
        } else if (*index) {
            const cmc::SurfaceMesh m = load_mesh(mesh_path);
            if (threshold > 0) eopt.threshold = threshold;
            const auto r = one_sided ? cmc::morse_index_one_sided(m, eopt) : cmc::morse_index(m, eopt);
            const json config{{"command", "index"}, {"mesh", mesh_path}, {"k", eopt.k}, {"threshold", r.threshold},
                              {"threshold_scale", eopt.threshold_scale}, {"max_sweeps", eopt.max_sweeps}, {"tol", eopt.tol},
                              {"one_sided", one_sided}};
            emit(out, config, cmc::to_json(r), r.index == r.inertia_index && !r.saturated, elapsed(t0));
        } else if (*inv) {
            cmc::TopologyProfile p;
            if (!profile_path.empty()) {
                try {
                    p = cmc::profile_from_json(read_json_file(profile_path));
                } catch (const json::exception& e) {
                    throw ConfigError(profile_path + ": " + e.what());
                }
            } else {
                if (ends.empty()) throw ConfigError("invariants: give --profile or --ends");
                p = cmc::make_profile(!nonorientable, genus, ends, branch);
            }
            const auto cm = cmc::cm_index_lower_bound(p);
            const auto par = cmc::parity_check(p, measured);
            json result{{"profile", cmc::to_json(p)},
                        {"cm_bound", {{"unified_rhs", cm.unified_rhs}, {"unified", cm.unified}, {"split_rhs", cm.split_rhs},
                                      {"split", cm.split}, {"bound", cm.bound}}},
                        {"even_bound", cmc::cm_index_lower_bound_even(p)},
                        {"spin_parity", par.spin_parity},
                        {"spinning_ends_floor", cmc::spinning_ends_floor(p)}};
            if (measured) result["jorge_meeks_residual"] = cmc::jorge_meeks_residual(p, *measured);
            emit(out, json{{"command", "invariants"}, {"profile", cmc::to_json(p)}}, result, par.pass, elapsed(t0));
        } else if (*hcheck) {
            json j = read_json_file(hier_path);
            cmc::Hierarchy h;
            try {
                h = cmc::hierarchy_from_json(j);
            } catch (const json::exception& e) {
                throw ConfigError(hier_path + ": " + e.what());
            }
            const auto violations = cmc::validate(h);
            json vj = json::array();
            for (const auto& v : violations) vj.push_back(cmc::to_string(v));
            json result{{"violations", vj}};
            bool pass = violations.empty();
            if (pass) {
                const auto s = cmc::stats(h);
                const auto mi = cmc::main_inequality(h);
                const auto pl = cmc::per_level_bounds(h);
                const auto dc = cmc::delta_complexity_bounds(h.root);
                result["stats"] = {{"L", s.L}, {"S_hat", s.S_hat}, {"O", s.O}, {"excess", s.excess}};
                result["correction_term"] = cmc::correction_term(h, cmc::Variant::general);
                result["main_inequality"] = cmc::to_json(mi);
                result["per_level_bounds"] = cmc::to_json(pl);
                result["delta_complexity_bounds"] = cmc::to_json(dc);
                pass = mi.pass() && pl.pass() && dc.pass();
            }
            emit(out, json{{"command", "hierarchy check"}, {"file", hier_path}}, result, pass, elapsed(t0));
        } else if (*hfuzz) {
            const auto tally = cmc::acceptance::fuzz_hierarchies(seed, count, cmc::worker_count(), caps);
            json failures = json::object();
            for (const auto& [k, v] : tally.failed) failures[k] = {{"count", v}, {"first_seed", tally.first_seed.at(k)}};
            const json config{{"command", "hierarchy fuzz"}, {"seed", seed}, {"count", count},
                              {"caps", {{"max_depth", caps.max_depth}, {"max_children", caps.max_children}, {"max_index", caps.max_index}}}};
            emit(out, config, json{{"hierarchies", tally.hierarchies}, {"invalid", tally.invalid}, {"failures", failures}},
                 tally.failed.empty(), elapsed(t0));
        } else if (*beval) {
            const auto args = parse_args(bound_args);
            const auto r = cmc::evaluate_bound(bound_name, args);
            json a = json::object();
            for (const auto& [k, v] : args) a[k] = v;
            emit(out, json{{"command", "bounds eval"}, {"name", bound_name}, {"args", a}}, cmc::to_json(r), true, elapsed(t0));
        } else if (*mcheck) {
            const cmc::SurfaceMesh m = load_mesh(mesh_path);
            const auto hyp = cmc::check_hypotheses(m, r1, r2, alpha, l0);
            const int mult = cmc::multiplicity(m, hyp.plane_normals.front(), r2, l0);
            const auto con = cmc::check_conclusions(m, mult, r1, r2, tau, alpha);
            const auto kap = cmc::boundary_geodesic_curvature(m, r2);
            const json config{{"command", "multigraph check"}, {"mesh", mesh_path}, {"r1", r1}, {"r2", r2},
                              {"alpha", alpha}, {"l0", l0}, {"tau", tau}};
            emit(out, config,
                 json{{"hypotheses", cmc::to_json(hyp)}, {"multiplicity", mult}, {"conclusions", cmc::to_json(con)},
                      {"geodesic_curvature", cmc::to_json(kap)}},
                 hyp.pass() && con.pass(), elapsed(t0));
        } else if (*acc) {
            const auto rep = cmc::run_acceptance(acfg, [](const cmc::CriterionResult& c) {
                std::cout << cmc::summary_line(c) << std::endl;
            });
            if (!out.path.empty()) {
                const json config{{"command", "acceptance"}, {"suite", suite}, {"seed", acfg.seed}, {"fuzz_count", acfg.fuzz_count}};
                const json report{{"tool", "cmch"}, {"version", CMCH_VERSION}, {"config", config}, {"pass", rep.pass()},
                                  {"result", cmc::to_json(rep)}};
                cmc::atomic_write(out.path, out.format == "csv" ? cmc::to_csv(report) : cmc::dump_json(report));
                cmc::atomic_write(out.path + ".meta.json",
                                  cmc::dump_json(json{{"timestamp", utc_now()}, {"criteria", cmc::acceptance_meta(rep)}}));
            }
            return rep.pass() ? 0 : 1;
        }
    } catch (const CheckFailed&) {
        return 1;
    } catch (const cmc::NonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
