// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dowave/dowave.hpp"
#include "dowave/verify.hpp"

using namespace dowave;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

bool within_rel(double got, double want, double tol) { return std::abs(got / want - 1.0) <= tol; }

void report_rows(std::ostringstream& os, const StudyReport& rep) {
    for (const auto& r : rep.rows) {
        os << "\n    N=" << r.N << " K=" << r.K << " M=" << r.M1 << ": err_inf=" << r.err_inf << " err_l2=" << r.err_l2;
        if (r.order_inf) os << " order_inf=" << *r.order_inf << " order_l2=" << *r.order_l2;
        if (r.failure) os << " failed: " << *r.failure;
    }
}

bool any_failure(const StudyReport& rep) {
    for (const auto& r : rep.rows) {
        if (r.failure) return true;
    }
    return false;
}

Outcome table1() {
    const auto rep = run_study(example1(), schedules::table1());
    const double inf[] = {0.0839, 0.0439, 0.0227, 0.0117, 0.0059};
    const double l2[] = {0.1225, 0.0634, 0.0326, 0.0167, 0.0085};
    const double oinf[] = {0.0, 0.9344, 0.9515, 0.9526, 0.9877};
    const double ol2[] = {0.0, 0.9502, 0.9596, 0.9650, 0.9743};
    bool ok = !any_failure(rep) && rep.rows.size() == 5;
    for (std::size_t q = 0; ok && q < 5; ++q) {
        const auto& r = rep.rows[q];
        ok = within_rel(r.err_inf, inf[q], 0.05) && within_rel(r.err_l2, l2[q], 0.05);
        if (ok && q > 0) ok = std::abs(*r.order_inf - oinf[q]) <= 0.05 && std::abs(*r.order_l2 - ol2[q]) <= 0.05;
    }
    std::ostringstream os;
    os << "errors within 5%, orders within 0.05";
    report_rows(os, rep);
    return {ok, os.str()};
}

Outcome table2() {
    const auto rep = run_study(example1(), schedules::table2(false));
    const double inf[] = {0.0093, 0.0024, 6.0481e-4};
    const double oinf[] = {0.0, 1.9542, 1.9885};
    bool ok = !any_failure(rep) && rep.rows.size() == 3;
    for (std::size_t q = 0; ok && q < 3; ++q) {
        const auto& r = rep.rows[q];
        ok = within_rel(r.err_inf, inf[q], 0.05);
        if (ok && q > 0) ok = std::abs(*r.order_inf - oinf[q]) <= 0.1;
    }
    std::ostringstream os;
    os << "L-inf errors within 5%, orders (against dbeta) within 0.1";
    report_rows(os, rep);
    return {ok, os.str()};
}

Outcome table3() {
    const auto rep = run_study(example1(), schedules::table3(false));
    const double inf[] = {0.4602, 0.1195, 0.0301, 0.0075};
    const double oinf[] = {0.0, 1.9453, 1.9892, 2.0048};
    bool ok = !any_failure(rep) && rep.rows.size() == 4;
    for (std::size_t q = 0; ok && q < 4; ++q) {
        const auto& r = rep.rows[q];
        ok = within_rel(r.err_inf, inf[q], 0.05);
        if (ok && q > 0) ok = std::abs(*r.order_inf - oinf[q]) <= 0.1;
    }
    std::ostringstream os;
    os << "L-inf errors within 5%, orders (against h) within 0.1";
    report_rows(os, rep);
    return {ok, os.str()};
}

Outcome oracle_equivalence() {
    const auto c = verify::adi_vs_dense(verify::Scale::full);
    return {c.passed, c.detail + ", grids 5x5, 9x9, 17x17"};
}

Outcome splitting() {
    const auto c = verify::splitting_perturbation(verify::Scale::full);
    return {c.passed, c.detail};
}

Outcome invariants() {
    bool ok = true;
    std::ostringstream os;
    for (const auto& c : {verify::coefficient_identities(verify::Scale::full), verify::quadrature_order(verify::Scale::full),
                          verify::thomas_vs_dense(verify::Scale::full), verify::fixed_points(verify::Scale::full)}) {
        ok = ok && c.passed;
        os << "\n    " << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail;
    }
    return {ok, "all invariants hold" + os.str()};
}

Outcome stability() {
    const auto base = example1();
    const std::size_t M = 16;
    const double eps = 1e-3, h = base.L1 / M;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> noise((M + 1) * (M + 1), 0.0);
    for (std::size_t i = 1; i < M; ++i) {
        for (std::size_t j = 1; j < M; ++j) noise[i * (M + 1) + j] = u(rng);
    }
    auto perturbed = base;
    perturbed.psi1 = [&](double x, double y) {
        const auto i = static_cast<std::size_t>(std::lround(x / h)), j = static_cast<std::size_t>(std::lround(y / h));
        return base.psi1(x, y) + eps * noise[i * (M + 1) + j];
    };
    std::vector<double> C;
    std::ostringstream os;
    os << "max|u_eps - u| / eps for tau = 1/40, 1/80, 1/160:";
    for (std::size_t N : {20u, 40u, 80u}) {
        const Discretization disc(base, M, M, N, 16);
        const Field a = run(base, disc), b = run(perturbed, disc);
        double d = 0.0;
        for (std::size_t q = 0; q < a.size(); ++q) d = std::max(d, std::abs(a.values()[q] - b.values()[q]));
        C.push_back(d / eps);
        os << ' ' << C.back();
    }
    const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
    os << " (spread " << *hi / *lo << ", limit 2)";
    return {*lo > 0.0 && *hi / *lo <= 2.0, os.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"table 1 reproduction", table1},
        {"table 2 reproduction (rows 1-3)", table2},
        {"table 3 reproduction (rows 1-4)", table3},
        {"oracle equivalence", oracle_equivalence},
        {"splitting perturbation scaling", splitting},
        {"invariant suite", invariants},
        {"stability probe", stability},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.passed) ++failed;
        std::cout << (o.passed ? "PASS" : "FAIL") << "  " << name << " (" << std::llround(s) << " s): " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
