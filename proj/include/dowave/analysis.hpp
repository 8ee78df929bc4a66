#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <ctime>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dowave/errors.hpp"
#include "dowave/model.hpp"
#include "dowave/stepper.hpp"

namespace dowave {

struct ErrorNorms {
    double inf = 0.0;
    double l2 = 0.0;
};

/// Max norm and sqrt(h1 h2 sum |e|^2) of numeric - exact over interior nodes.
inline ErrorNorms error_norms(const Field& numeric, const Field& exact, const Discretization& disc) {
    if (!numeric.same_shape(exact) || numeric.M1() != disc.M1() || numeric.M2() != disc.M2()) {
        throw ShapeMismatch("error_norms: fields do not match the grid");
    }
    ErrorNorms e;
    double sum = 0.0;
    for (std::size_t i = 1; i < disc.M1(); ++i) {
        for (std::size_t j = 1; j < disc.M2(); ++j) {
            const double d = std::abs(numeric(i, j) - exact(i, j));
            e.inf = std::max(e.inf, d);
            sum += d * d;
        }
    }
    e.l2 = std::sqrt(sum * disc.h1() * disc.h2());
    return e;
}

/// log(e_coarse / e_fine) / log(ratio).
inline double observed_order(double e_coarse, double e_fine, double ratio) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) throw UndefinedOrder("observed order needs two positive errors");
    if (!(ratio > 1.0)) throw UndefinedOrder("observed order needs a refinement ratio above 1");
    return std::log(e_coarse / e_fine) / std::log(ratio);
}

inline constexpr double relative_error_floor = 1e-12;

/// |U - u| / |U| nodewise with U the exact field; where |U| <= 1e-12 the
/// absolute difference is reported instead.
inline Field relative_error_field(const Field& numeric, const Field& exact) {
    if (!numeric.same_shape(exact)) throw ShapeMismatch("relative_error_field: shapes differ");
    Field out(exact.M1(), exact.M2());
    for (std::size_t i = 0; i <= exact.M1(); ++i) {
        for (std::size_t j = 0; j <= exact.M2(); ++j) {
            const double d = std::abs(numeric(i, j) - exact(i, j));
            const double ref = std::abs(exact(i, j));
            out(i, j) = ref > relative_error_floor ? d / ref : d;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Convergence studies

/// Refinement parameter the order columns are measured against.
enum class OrderControl { tau, h, dbeta };

inline std::string to_string(OrderControl c) {
    switch (c) {
        case OrderControl::tau: return "tau";
        case OrderControl::h: return "h";
        case OrderControl::dbeta: return "dbeta";
    }
    return "tau";
}

inline OrderControl order_control_from_string(const std::string& s) {
    if (s == "tau") return OrderControl::tau;
    if (s == "h") return OrderControl::h;
    if (s == "dbeta") return OrderControl::dbeta;
    throw InvalidProblem("unknown order control '" + s + "' (expected tau, h or dbeta)");
}

struct ScheduleRow {
    std::size_t M1 = 0, M2 = 0, N = 0, K = 0;
};

struct Schedule {
    std::string name;
    std::vector<ScheduleRow> rows;
    OrderControl control = OrderControl::tau;
};

namespace schedules {

/// tau = 1/10 .. 1/160 at h = pi/500, dbeta = 1/160 (T = 1/2, so N = T / tau).
inline Schedule table1() {
    Schedule s{"table1", {}, OrderControl::tau};
    for (std::size_t N : {5, 10, 20, 40, 80}) s.rows.push_back({500, 500, N, 160});
    return s;
}

/// tau x4 and dbeta x2 per row at h = pi/500; rows 1-3, or all four with `full`.
inline Schedule table2(bool full = false) {
    Schedule s{full ? "table2-full" : "table2", {}, OrderControl::dbeta};
    s.rows = {{500, 500, 50, 10}, {500, 500, 200, 20}, {500, 500, 800, 40}};
    if (full) s.rows.push_back({500, 500, 3200, 80});
    return s;
}

/// tau x4, h x2, dbeta x2 per row; rows 1-4, or all six with `full`.
inline Schedule table3(bool full = false) {
    Schedule s{full ? "table3-full" : "table3", {}, OrderControl::h};
    s.rows = {{2, 2, 32, 8}, {4, 4, 128, 16}, {8, 8, 512, 32}, {16, 16, 2048, 64}};
    if (full) {
        s.rows.push_back({32, 32, 8192, 128});
        s.rows.push_back({64, 64, 32768, 256});
    }
    return s;
}

inline std::optional<Schedule> by_name(const std::string& name) {
    if (name == "table1") return table1();
    if (name == "table2") return table2(false);
    if (name == "table2-full") return table2(true);
    if (name == "table3") return table3(false);
    if (name == "table3-full") return table3(true);
    return std::nullopt;
}

}  // namespace schedules

struct StudyRow {
    std::size_t M1 = 0, M2 = 0, N = 0, K = 0;
    double tau = 0.0, h1 = 0.0, h2 = 0.0, dbeta = 0.0;
    double err_inf = 0.0, err_l2 = 0.0;
    std::optional<double> order_inf, order_l2;
    double seconds = 0.0;
    std::optional<std::string> failure;
};

struct StudyReport {
    std::string case_name;
    std::string schedule_name;
    OrderControl control = OrderControl::tau;
    std::string timestamp;
    std::vector<StudyRow> rows;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Refinement ratio of the controlling parameter between two rows.
inline double refinement_ratio(const StudyRow& coarse, const StudyRow& fine, OrderControl control) {
    switch (control) {
        case OrderControl::tau: return coarse.tau / fine.tau;
        case OrderControl::h: return std::max(coarse.h1, coarse.h2) / std::max(fine.h1, fine.h2);
        case OrderControl::dbeta: return coarse.dbeta / fine.dbeta;
    }
    return 1.0;
}

struct StudyOptions {
    std::size_t threads = 1;
    /// Called after each finished row, for progress output.
    std::function<void(const StudyRow&)> on_row;
};

/// Runs the solver on every row and measures the error at t = T against the
/// exact solution. A failing row is recorded and the study moves on.
inline StudyReport run_study(const ProblemSpec& spec, const Schedule& schedule, const StudyOptions& opt = {}) {
    if (!spec.has_exact()) throw InvalidProblem("study needs a case with a known exact solution");
    StudyReport report{spec.name, schedule.name, schedule.control, utc_timestamp(), {}};
    for (const auto& r : schedule.rows) {
        StudyRow row;
        row.M1 = r.M1;
        row.M2 = r.M2;
        row.N = r.N;
        row.K = r.K;
        const auto start = std::chrono::steady_clock::now();
        try {
            const Discretization disc(spec, r.M1, r.M2, r.N, r.K);
            row.tau = disc.tau();
            row.h1 = disc.h1();
            row.h2 = disc.h2();
            row.dbeta = disc.dbeta();
            const Field numeric = run(spec, disc, {}, StepOptions{opt.threads});
            const ErrorNorms e = error_norms(numeric, sample(disc, spec.exact, disc.T()), disc);
            row.err_inf = e.inf;
            row.err_l2 = e.l2;
        } catch (const std::exception& ex) {
            row.failure = ex.what();
            row.err_inf = row.err_l2 = std::numeric_limits<double>::quiet_NaN();
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        if (!report.rows.empty()) {
            const StudyRow& prev = report.rows.back();
            const double ratio = refinement_ratio(prev, row, schedule.control);
            if (!prev.failure && !row.failure && ratio > 1.0) {
                if (prev.err_inf > 0.0 && row.err_inf > 0.0) row.order_inf = observed_order(prev.err_inf, row.err_inf, ratio);
                if (prev.err_l2 > 0.0 && row.err_l2 > 0.0) row.order_l2 = observed_order(prev.err_l2, row.err_l2, ratio);
            }
        }
        report.rows.push_back(row);
        if (opt.on_row) opt.on_row(report.rows.back());
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report output

inline nlohmann::json to_json(const StudyReport& report) {
    using nlohmann::json;
    json rows = json::array();
    for (const auto& r : report.rows) {
        json j = {{"M1", r.M1}, {"M2", r.M2}, {"N", r.N}, {"K", r.K},
                  {"tau", r.tau}, {"h1", r.h1}, {"h2", r.h2}, {"dbeta", r.dbeta},
                  {"seconds", r.seconds}};
        j["err_inf"] = r.failure ? json(nullptr) : json(r.err_inf);
        j["err_l2"] = r.failure ? json(nullptr) : json(r.err_l2);
        j["order_inf"] = r.order_inf ? json(*r.order_inf) : json(nullptr);
        j["order_l2"] = r.order_l2 ? json(*r.order_l2) : json(nullptr);
        if (r.failure) j["failure"] = *r.failure;
        rows.push_back(std::move(j));
    }
    return json{{"metadata",
                 {{"case", report.case_name},
                  {"schedule", report.schedule_name},
                  {"timestamp", report.timestamp},
                  {"error_time", "T"},
                  {"norms",
                   {{"err_inf", "max over interior nodes of |U_ij - u_ij|"},
                    {"err_l2", "sqrt(h1 h2 sum over interior nodes of |U_ij - u_ij|^2)"}}},
                  {"order_against", to_string(report.control)},
                  {"order_definition", "log(e_prev / e_row) / log(ratio of the order_against parameter)"}}},
                {"rows", std::move(rows)}};
}

namespace detail {

inline std::string full_precision(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

/// Columns: tau, h1, h2, dbeta, err_inf, order_inf, err_l2, order_l2, seconds.
/// Absent orders and failed errors are empty cells.
inline void write_csv(std::ostream& os, const StudyReport& report) {
    using detail::full_precision;
    os << "tau,h1,h2,dbeta,err_inf,order_inf,err_l2,order_l2,seconds\n";
    auto opt = [](const std::optional<double>& v) { return v ? full_precision(*v) : std::string{}; };
    for (const auto& r : report.rows) {
        const std::string einf = r.failure ? "" : full_precision(r.err_inf);
        const std::string el2 = r.failure ? "" : full_precision(r.err_l2);
        os << full_precision(r.tau) << ',' << full_precision(r.h1) << ',' << full_precision(r.h2) << ','
           << full_precision(r.dbeta) << ',' << einf << ',' << opt(r.order_inf) << ',' << el2 << ','
           << opt(r.order_l2) << ',' << full_precision(r.seconds) << '\n';
    }
}

namespace detail {

inline std::string fraction(double v) {
    if (!(v > 0.0)) return "-";
    const double inv = 1.0 / v;
    const double rounded = std::round(inv);
    std::ostringstream os;
    if (std::abs(inv - rounded) < 1e-9 * inv) {
        os << "1/" << static_cast<long long>(rounded);
    } else {
        os << std::setprecision(6) << v;
    }
    return os.str();
}

inline std::string pi_fraction(double h) {
    if (!(h > 0.0)) return "-";
    const double m = std::numbers::pi / h;
    const double rounded = std::round(m);
    std::ostringstream os;
    if (std::abs(m - rounded) < 1e-9 * m) {
        os << "pi/" << static_cast<long long>(rounded);
    } else {
        os << std::setprecision(6) << h;
    }
    return os.str();
}

inline std::string short_number(double v) {
    std::ostringstream os;
    if (std::isnan(v)) return "failed";
    if (v != 0.0 && std::abs(v) < 1e-3) {
        os << std::scientific << std::setprecision(4) << v;
    } else {
        os << std::fixed << std::setprecision(4) << v;
    }
    return os.str();
}

}  // namespace detail

/// Human-readable table: tau, h1 = h2, dbeta, L-inf error, order, L2 error, order.
inline void print_table(std::ostream& os, const StudyReport& report) {
    using namespace detail;
    os << "case " << report.case_name << ", schedule " << report.schedule_name << " (orders against "
       << to_string(report.control) << ")\n";
    os << std::left << std::setw(10) << "tau" << std::setw(10) << "h1=h2" << std::setw(10) << "dbeta" << std::setw(14)
       << "err_inf" << std::setw(9) << "order" << std::setw(14) << "err_l2" << std::setw(9) << "order"
       << "seconds\n";
    for (const auto& r : report.rows) {
        auto ord = [](const std::optional<double>& o) {
            if (!o) return std::string("-");
            std::ostringstream s;
            s << std::fixed << std::setprecision(4) << *o;
            return s.str();
        };
        os << std::setw(10) << fraction(r.tau) << std::setw(10) << pi_fraction(r.h1) << std::setw(10)
           << fraction(r.dbeta) << std::setw(14) << short_number(r.err_inf) << std::setw(9) << ord(r.order_inf)
           << std::setw(14) << short_number(r.err_l2) << std::setw(9) << ord(r.order_l2) << std::fixed
           << std::setprecision(2) << r.seconds;
        if (r.failure) os << "  (" << *r.failure << ")";
        os << '\n';
    }
}

}  // namespace dowave
