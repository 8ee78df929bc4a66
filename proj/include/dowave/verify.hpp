#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dowave/analysis.hpp"
#include "dowave/coefficients.hpp"
#include "dowave/model.hpp"
#include "dowave/operators.hpp"
#include "dowave/reference.hpp"
#include "dowave/stepper.hpp"

// Oracle checks run by `dowave verify`.

namespace dowave::verify {

enum class Scale { small, full };

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, std::abs(a.values()[q] - b.values()[q]));
    return m;
}

inline double max_abs(const Field& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

template <typename Fn>
CheckResult guarded(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {name, false, std::string("threw: ") + e.what()};
    }
}

}  // namespace detail

/// a_k monotone and positive, W_j > 0, telescoping sum, s_1 = tau mu.
inline CheckResult coefficient_identities(Scale scale) {
    return detail::guarded("coefficient identities", [&] {
        const ProblemSpec spec = example1();
        const std::size_t N = scale == Scale::full ? 2048 : 256;
        const std::size_t K = scale == Scale::full ? 64 : 16;
        const Discretization disc(spec, 4, 4, N, K);
        const CoefficientTable tab(spec, disc);
        bool ok = true;
        for (std::size_t l = 0; l < K; ++l) {
            for (std::size_t k = 0; k + 1 < N; ++k) ok = ok && tab.a(l, k) > tab.a(l, k + 1) && tab.a(l, k + 1) > 0.0;
        }
        for (double w : tab.W()) ok = ok && w > 0.0;
        double worst_tel = 0.0;
        double partial = 0.0;
        for (std::size_t n = 1; n <= N; ++n) {
            if (n >= 2) partial += tab.W(n - 1);
            double tail = 0.0;
            for (std::size_t l = 0; l < K; ++l) tail += tab.level_scale(l) * tab.a(l, n - 1);
            worst_tel = std::max(worst_tel, std::abs(partial - (tab.mu() - tail)) / tab.mu());
        }
        const double s1 = std::abs(tab.s(1) - tab.tau() * tab.mu()) / (tab.tau() * tab.mu());
        ok = ok && worst_tel <= 1e-12 && s1 <= 1e-14;
        std::ostringstream os;
        os << "telescoping rel err " << worst_tel << ", s_1 rel err " << s1;
        return CheckResult{"coefficient identities", ok, os.str()};
    });
}

/// Midpoint order integral of Gamma(4 - b) converges with order 2 as K doubles.
inline CheckResult quadrature_order(Scale) {
    return detail::guarded("quadrature order", [&] {
        auto p = [](double b) { return std::tgamma(4.0 - b); };
        const double ref = reference::precise_order_integral(p);
        const double e1 = std::abs(order_integral(p, 32) - ref);
        const double e2 = std::abs(order_integral(p, 64) - ref);
        const double order = observed_order(e1, e2, 2.0);
        std::ostringstream os;
        os << "observed order " << order;
        return CheckResult{"quadrature order", order >= 1.9 && order <= 2.1, os.str()};
    });
}

/// Thomas elimination against dense elimination on random dominant systems.
inline CheckResult thomas_vs_dense(Scale scale) {
    return detail::guarded("thomas vs dense", [&] {
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::uniform_int_distribution<std::size_t> len(2, 200);
        const std::size_t trials = scale == Scale::full ? 1000 : 200;
        double worst = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const std::size_t n = len(rng);
            TridiagonalSystem sys;
            sys.lower.resize(n - 1);
            sys.upper.resize(n - 1);
            sys.diag.resize(n);
            sys.rhs.resize(n);
            for (auto& v : sys.lower) v = unit(rng);
            for (auto& v : sys.upper) v = unit(rng);
            for (std::size_t i = 0; i < n; ++i) {
                const double off = (i > 0 ? std::abs(sys.lower[i - 1]) : 0.0) + (i + 1 < n ? std::abs(sys.upper[i]) : 0.0);
                sys.diag[i] = (unit(rng) < 0 ? -1.0 : 1.0) * (off + 0.1 + std::abs(unit(rng)));
                sys.rhs[i] = unit(rng);
            }
            reference::DenseMatrix A(n);
            for (std::size_t i = 0; i < n; ++i) {
                A(i, i) = sys.diag[i];
                if (i > 0) A(i, i - 1) = sys.lower[i - 1];
                if (i + 1 < n) A(i, i + 1) = sys.upper[i];
            }
            const auto x = thomas_solve(sys);
            const auto y = A.solve(sys.rhs);
            double scale_y = 0.0, diff = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                scale_y = std::max(scale_y, std::abs(y[i]));
                diff = std::max(diff, std::abs(x[i] - y[i]));
            }
            worst = std::max(worst, diff / std::max(scale_y, 1e-300));
        }
        std::ostringstream os;
        os << trials << " systems, worst relative difference " << worst;
        return CheckResult{"thomas vs dense", worst <= 1e-10, os.str()};
    });
}

/// ADI sweeps against the one-shot dense factored solve, step by step on Example 1.
inline CheckResult adi_vs_dense(Scale scale) {
    return detail::guarded("ADI vs dense factored", [&] {
        const ProblemSpec spec = example1();
        double worst = 0.0;
        std::vector<std::size_t> grids{8};
        if (scale == Scale::full) grids = {4, 8, 16};
        for (std::size_t M : grids) {
            const Discretization disc(spec, M, M, 10, 8);
            SolverState state(spec, disc);
            while (state.step() < disc.N()) {
                const Field rhs = assemble_rhs(state);
                const Field dense = reference::dense_factored_step(state, rhs);
                const Field& adi = step(state);
                worst = std::max(worst, detail::max_abs_diff(adi, dense) / (1.0 + detail::max_abs(rhs)));
            }
        }
        std::ostringstream os;
        os << "max |ADI - dense| / (1 + |rhs|) = " << worst << " (tolerance 1e-10)";
        return CheckResult{"ADI vs dense factored", worst <= 1e-10, os.str()};
    });
}

/// Factor by which |ADI - unsplit| at T shrinks when tau halves on an 8x8 grid.
inline double splitting_reduction_factor(std::size_t N = 8, std::size_t K = 8) {
    const ProblemSpec spec = example1();
    const Discretization coarse(spec, 8, 8, N, K), fine(spec, 8, 8, 2 * N, K);
    const double dc = detail::max_abs_diff(run(spec, coarse), reference::run_unsplit(spec, coarse));
    const double df = detail::max_abs_diff(run(spec, fine), reference::run_unsplit(spec, fine));
    return dc / df;
}

inline CheckResult splitting_perturbation(Scale) {
    return detail::guarded("splitting perturbation scaling", [&] {
        const double factor = splitting_reduction_factor();
        std::ostringstream os;
        os << "|ADI - unsplit| shrinks by " << factor << " when tau halves (expected within [3, 5])";
        return CheckResult{"splitting perturbation scaling", factor >= 3.0 && factor <= 5.0, os.str()};
    });
}

inline CheckResult fixed_points(Scale) {
    return detail::guarded("zero and constant fixed points", [&] {
        double worst = 0.0;
        for (double c : {0.0, 3.5, -1.25}) {
            const ProblemSpec spec = c == 0.0 ? zero_case() : constant_case(c);
            for (auto [M1, M2, N, K] : {std::array<std::size_t, 4>{5, 7, 12, 3}, {9, 4, 30, 10}}) {
                const Discretization disc(spec, M1, M2, N, K);
                const Field u = run(spec, disc);
                for (double v : u.values()) worst = std::max(worst, std::abs(v - c));
            }
        }
        std::ostringstream os;
        os << "max deviation " << worst;
        return CheckResult{"zero and constant fixed points", worst <= 1e-12, os.str()};
    });
}

inline std::vector<CheckResult> run_all(Scale scale) {
    return {coefficient_identities(scale), quadrature_order(scale), thomas_vs_dense(scale),
            adi_vs_dense(scale),           splitting_perturbation(scale), fixed_points(scale)};
}

}  // namespace dowave::verify
