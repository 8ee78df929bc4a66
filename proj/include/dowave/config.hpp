#pragma once

#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dowave/analysis.hpp"
#include "dowave/errors.hpp"
#include "dowave/model.hpp"
#include "dowave/stepper.hpp"

// Run configuration: a JSON document with the keys
//
//   case      "example1" | "zero" | {"name": "constant", "value": c}
//             | {"name": "separable", "time_poly": [...], "kx", "ky", "px", "py",
//                "L1", "L2", "T", "nonlinear", "weight": "gamma4" | [coeffs]}
//   M1, M2, N, K    grid sizes (solve)
//   schedule  "table1" | "table2" | "table2-full" | "table3" | "table3-full"
//             | {"name", "order_against": "tau"|"h"|"dbeta", "rows": [{M1, M2, N, K}, ...]}  (study)
//   threads   worker threads inside one solve
//   output    {"field", "exact", "snapshot_every", "track_errors", "memory_budget_gib"}
//
// Unknown keys are rejected.

namespace dowave::config {

/// Bad configuration; key() names the offending entry (dotted path).
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct OutputOptions {
    bool field = true;
    bool exact = true;
    std::size_t snapshot_every = 0;
    bool track_errors = false;
    double memory_budget_gib = 4.0;
};

struct SolveConfig {
    ProblemSpec spec;
    std::size_t M1 = 0, M2 = 0, N = 0, K = 0;
    std::size_t threads = 1;
    OutputOptions output;
};

struct StudyConfig {
    ProblemSpec spec;
    Schedule schedule;
    std::size_t threads = 1;
    OutputOptions output;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& prefix) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(prefix + key, "unknown key");
    }
}

inline std::string path(const std::string& prefix, const char* key) { return prefix + key; }

inline std::size_t get_count(const json& obj, const char* key, const std::string& prefix, bool required,
                             std::size_t fallback = 0) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(path(prefix, key), "missing required key");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(path(prefix, key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

inline double get_number(const json& obj, const char* key, const std::string& prefix, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path(prefix, key), "expected a number");
    return v.get<double>();
}

inline bool get_bool(const json& obj, const char* key, const std::string& prefix, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(path(prefix, key), "expected true or false");
    return v.get<bool>();
}

inline std::vector<double> get_coeffs(const json& v, const std::string& key) {
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& c : v) {
        if (!c.is_number()) throw ConfigError(key, "expected a non-empty array of numbers");
        out.push_back(c.get<double>());
    }
    return out;
}

}  // namespace detail

inline ProblemSpec parse_case(const nlohmann::json& v) {
    using namespace detail;
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        if (name == "example1") return example1();
        if (name == "zero") return zero_case();
        if (name == "constant") throw ConfigError("case.value", "the constant case needs a value; use {\"name\": \"constant\", \"value\": c}");
        if (name == "separable") throw ConfigError("case", "the separable case needs parameters; use an object");
        throw ConfigError("case", "unknown case '" + name + "' (expected example1, zero, constant or separable)");
    }
    if (!v.is_object()) throw ConfigError("case", "expected a case name or an object");
    if (!v.contains("name") || !v.at("name").is_string()) throw ConfigError("case.name", "missing required key");
    const auto name = v.at("name").get<std::string>();
    const std::string prefix = "case.";
    if (name == "example1" || name == "zero") {
        reject_unknown(v, {"name"}, prefix);
        return name == "zero" ? zero_case() : example1();
    }
    if (name == "constant") {
        reject_unknown(v, {"name", "value"}, prefix);
        if (!v.contains("value")) throw ConfigError("case.value", "missing required key");
        return constant_case(get_number(v, "value", prefix, 0.0));
    }
    if (name == "separable") {
        reject_unknown(v, {"name", "time_poly", "kx", "ky", "px", "py", "L1", "L2", "T", "nonlinear", "weight"}, prefix);
        SeparableParams prm;
        if (!v.contains("time_poly")) throw ConfigError("case.time_poly", "missing required key");
        prm.time_poly = get_coeffs(v.at("time_poly"), "case.time_poly");
        prm.kx = get_number(v, "kx", prefix, prm.kx);
        prm.ky = get_number(v, "ky", prefix, prm.ky);
        prm.px = get_number(v, "px", prefix, prm.px);
        prm.py = get_number(v, "py", prefix, prm.py);
        prm.L1 = get_number(v, "L1", prefix, prm.L1);
        prm.L2 = get_number(v, "L2", prefix, prm.L2);
        prm.T = get_number(v, "T", prefix, prm.T);
        prm.nonlinear = get_number(v, "nonlinear", prefix, prm.nonlinear);
        if (!(prm.L1 > 0.0)) throw ConfigError("case.L1", "must be positive");
        if (!(prm.L2 > 0.0)) throw ConfigError("case.L2", "must be positive");
        if (!(prm.T > 0.0)) throw ConfigError("case.T", "must be positive");
        if (v.contains("weight")) {
            const auto& w = v.at("weight");
            if (w.is_string() && w.get<std::string>() == "gamma4") {
                prm.weight.kind = WeightChoice::Kind::gamma4;
            } else if (w.is_array()) {
                prm.weight.coeffs = get_coeffs(w, "case.weight");
            } else {
                throw ConfigError("case.weight", "expected \"gamma4\" or an array of polynomial coefficients");
            }
        }
        return separable_case(prm);
    }
    throw ConfigError("case.name", "unknown case '" + name + "'");
}

inline OutputOptions parse_output(const nlohmann::json& root) {
    using namespace detail;
    OutputOptions out;
    if (!root.contains("output")) return out;
    const auto& v = root.at("output");
    if (!v.is_object()) throw ConfigError("output", "expected an object");
    const std::string prefix = "output.";
    reject_unknown(v, {"field", "exact", "snapshot_every", "track_errors", "memory_budget_gib"}, prefix);
    out.field = get_bool(v, "field", prefix, out.field);
    out.exact = get_bool(v, "exact", prefix, out.exact);
    out.snapshot_every = get_count(v, "snapshot_every", prefix, false, 0);
    out.track_errors = get_bool(v, "track_errors", prefix, out.track_errors);
    out.memory_budget_gib = get_number(v, "memory_budget_gib", prefix, out.memory_budget_gib);
    if (!(out.memory_budget_gib > 0.0)) throw ConfigError("output.memory_budget_gib", "must be positive");
    return out;
}

inline Schedule parse_schedule(const nlohmann::json& v) {
    using namespace detail;
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        if (auto s = schedules::by_name(name)) return *s;
        throw ConfigError("schedule", "unknown schedule '" + name + "' (expected table1, table2, table2-full, table3 or table3-full)");
    }
    if (!v.is_object()) throw ConfigError("schedule", "expected a schedule name or an object");
    reject_unknown(v, {"name", "order_against", "rows"}, "schedule.");
    Schedule s;
    s.name = v.contains("name") && v.at("name").is_string() ? v.at("name").get<std::string>() : "custom";
    if (v.contains("order_against")) {
        if (!v.at("order_against").is_string()) throw ConfigError("schedule.order_against", "expected tau, h or dbeta");
        try {
            s.control = order_control_from_string(v.at("order_against").get<std::string>());
        } catch (const InvalidProblem& e) {
            throw ConfigError("schedule.order_against", e.what());
        }
    }
    if (!v.contains("rows")) throw ConfigError("schedule.rows", "missing required key");
    const auto& rows = v.at("rows");
    if (!rows.is_array()) throw ConfigError("schedule.rows", "expected an array");
    if (rows.empty()) throw ConfigError("schedule.rows", "schedule is empty");
    for (std::size_t q = 0; q < rows.size(); ++q) {
        const std::string prefix = "schedule.rows[" + std::to_string(q) + "].";
        const auto& r = rows[q];
        if (!r.is_object()) throw ConfigError(prefix.substr(0, prefix.size() - 1), "expected an object");
        reject_unknown(r, {"M1", "M2", "N", "K"}, prefix);
        s.rows.push_back({get_count(r, "M1", prefix, true), get_count(r, "M2", prefix, true),
                          get_count(r, "N", prefix, true), get_count(r, "K", prefix, true)});
    }
    return s;
}

inline constexpr std::initializer_list<const char*> top_level_keys = {"case", "M1", "M2", "N", "K",
                                                                       "schedule", "threads", "output"};

inline SolveConfig parse_solve_config(const nlohmann::json& root) {
    using namespace detail;
    if (!root.is_object()) throw ConfigError("config", "expected a JSON object at the top level");
    reject_unknown(root, top_level_keys, "");
    if (!root.contains("case")) throw ConfigError("case", "missing required key");
    SolveConfig cfg{parse_case(root.at("case")), 0, 0, 0, 0, 1, {}};
    cfg.M1 = get_count(root, "M1", "", true);
    cfg.M2 = get_count(root, "M2", "", true);
    cfg.N = get_count(root, "N", "", true);
    cfg.K = get_count(root, "K", "", true);
    if (cfg.M1 < 2) throw ConfigError("M1", "must be at least 2");
    if (cfg.M2 < 2) throw ConfigError("M2", "must be at least 2");
    if (cfg.N < 1) throw ConfigError("N", "must be at least 1");
    if (cfg.K < 1) throw ConfigError("K", "must be at least 1");
    cfg.threads = std::max<std::size_t>(1, get_count(root, "threads", "", false, 1));
    cfg.output = parse_output(root);
    return cfg;
}

inline StudyConfig parse_study_config(const nlohmann::json& root) {
    using namespace detail;
    if (!root.is_object()) throw ConfigError("config", "expected a JSON object at the top level");
    reject_unknown(root, top_level_keys, "");
    StudyConfig cfg{root.contains("case") ? parse_case(root.at("case")) : example1(), {}, 1, {}};
    if (!root.contains("schedule")) throw ConfigError("schedule", "missing required key");
    cfg.schedule = parse_schedule(root.at("schedule"));
    if (cfg.schedule.rows.empty()) throw ConfigError("schedule", "schedule is empty");
    cfg.threads = std::max<std::size_t>(1, get_count(root, "threads", "", false, 1));
    cfg.output = parse_output(root);
    return cfg;
}

inline nlohmann::json load_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config", "cannot open '" + file + "'");
    try {
        return nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("not valid JSON: ") + e.what());
    }
}

/// Refuses a run whose history would exceed the budget, with the
/// N (M1-1)(M2-1) * 8 bytes estimate in the message.
inline void check_memory_budget(std::size_t M1, std::size_t M2, std::size_t N, double budget_gib) {
    const double bytes = static_cast<double>(N) * static_cast<double>(M1 - 1) * static_cast<double>(M2 - 1) * 8.0;
    const double gib = bytes / (1024.0 * 1024.0 * 1024.0);
    if (gib > budget_gib) {
        std::ostringstream os;
        os << std::setprecision(3) << "history buffer needs N*(M1-1)*(M2-1)*8 bytes = " << N << "*" << (M1 - 1) << "*"
           << (M2 - 1) << "*8 = " << gib << " GiB, above the budget of " << budget_gib
           << " GiB (raise output.memory_budget_gib to allow it)";
        throw ConfigError("output.memory_budget_gib", os.str());
    }
}

}  // namespace dowave::config
