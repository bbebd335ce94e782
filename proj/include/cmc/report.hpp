#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmc {

using json = nlohmann::json;

/// A real number that may be +infinity, kept as an explicit flag.
struct ExtReal {
    double value = 0.0;
    bool infinite = false;

    static ExtReal inf() { return {0.0, true}; }
    static ExtReal of(double v) { return {v, false}; }

    bool is_finite() const { return !infinite; }
    double as_double() const { return infinite ? std::numeric_limits<double>::infinity() : value; }
};

inline bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.value < b.value;
}

inline ExtReal ext_min(const ExtReal& a, const ExtReal& b) { return (b < a) ? b : a; }
inline ExtReal ext_max(const ExtReal& a, const ExtReal& b) { return (a < b) ? b : a; }

inline json to_json_value(const ExtReal& x) {
    if (x.infinite) return json("inf");
    return json(x.value);
}

/// One inequality or identity. slack = lhs - rhs for "lhs >= rhs" checks,
/// -|residual| style for identities (pass when within tolerance).
struct Check {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = true;
    std::string detail;
};

struct VerificationReport {
    std::string name;
    std::vector<Check> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add_geq(const std::string& n, double lhs, double rhs, const std::string& detail = {}) {
        checks.push_back({n, lhs, rhs, lhs - rhs, lhs >= rhs, detail});
    }
    void add_leq(const std::string& n, double lhs, double rhs, const std::string& detail = {}) {
        checks.push_back({n, lhs, rhs, rhs - lhs, lhs <= rhs, detail});
    }
    void add_flag(const std::string& n, bool ok, const std::string& detail = {}) {
        checks.push_back({n, ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, ok, detail});
    }
    void append(const VerificationReport& other, const std::string& prefix = {}) {
        for (auto c : other.checks) {
            if (!prefix.empty()) c.name = prefix + c.name;
            checks.push_back(std::move(c));
        }
    }
};

inline json to_json(const Check& c) {
    return json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack},
                {"pass", c.pass}, {"detail", c.detail}};
}

inline json to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return json{{"name", r.name}, {"pass", r.pass()}, {"checks", checks}};
}

// ---------------------------------------------------------------- io helpers

/// 17 significant digits, the precision used for every float we write.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void dump_json(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
    const std::string pad_close(static_cast<size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            dump_json(os, it.value(), indent, depth + 1);
        }
        os << "\n" << pad_close << "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        // numeric arrays stay on one line
        bool flat = true;
        for (const auto& e : j)
            if (e.is_structured()) { flat = false; break; }
        if (flat) {
            os << "[";
            for (size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                dump_json(os, j[i], indent, depth + 1);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            dump_json(os, j[i], indent, depth + 1);
        }
        os << "\n" << pad_close << "]";
        return;
    }
    case json::value_t::number_float: {
        double v = j.get<double>();
        if (!std::isfinite(v)) { os << json(format_real(v)).dump(); return; }
        std::string s = format_real(v);
        // keep floats recognisable as floats
        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
        os << s;
        return;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

/// Deterministic pretty printer (floats with 17 significant digits).
inline std::string dump_json(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::dump_json(os, j, indent, 0);
    os << "\n";
    return os.str();
}

/// Write through a temporary file and rename, so readers never see a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path() && !path.parent_path().empty())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace detail {

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "." + std::to_string(i), out);
    } else if (j.is_number_float()) {
        out.emplace_back(prefix, format_real(j.get<double>()));
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char c : s) {
        if (c == '"') r += "\"\"";
        else r += c;
    }
    return r + "\"";
}

} // namespace detail

/// Flatten nested JSON into dotted columns. An array of objects becomes one row each.
inline std::string to_csv(const json& j) {
    std::vector<json> rows;
    if (j.is_array()) rows.assign(j.begin(), j.end());
    else rows.push_back(j);

    std::vector<std::string> columns;
    std::vector<std::vector<std::pair<std::string, std::string>>> flat(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        detail::flatten(rows[r], "", flat[r]);
        for (const auto& [k, v] : flat[r]) {
            if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
        }
    }
    std::ostringstream os;
    for (size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << detail::csv_escape(columns[c]);
    os << "\n";
    for (const auto& row : flat) {
        for (size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ",";
            for (const auto& [k, v] : row)
                if (k == columns[c]) { os << detail::csv_escape(v); break; }
        }
        os << "\n";
    }
    return os.str();
}

} // namespace cmc
