#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dowave/reference.hpp"
#include "dowave/stepper.hpp"

using namespace dowave;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) m = std::max(m, std::abs(a.values()[q] - b.values()[q]));
    return m;
}

// Zero data on [0,4]^2 with T = 1 and a constant weight chosen so that
// mu = 4 for K = 1, N = 1: c = p tau^{-1.5} / Gamma(1.5) = 4.
ProblemSpec unit_mu_four() {
    ProblemSpec spec = zero_case();
    spec.L1 = spec.L2 = 4.0;
    spec.T = 1.0;
    const double w = 4.0 * std::tgamma(1.5);
    spec.weight = [w](double) { return w; };
    return spec;
}

}  // namespace

TEST(DenseMatrix, SolveAndMultiply) {
    reference::DenseMatrix A(3);
    const double vals[3][3] = {{0.0, 2.0, 1.0}, {1.0, 1.0, 0.0}, {3.0, 0.0, 1.0}};
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) A(r, c) = vals[r][c];
    }
    const std::vector<double> x{1.0, -2.0, 0.5};
    const auto y = A.solve(A.multiply(x));
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(y[k], x[k], 1e-14);
    reference::DenseMatrix S(2);
    S(0, 0) = 1.0;
    S(0, 1) = 2.0;
    S(1, 0) = 2.0;
    S(1, 1) = 4.0;
    EXPECT_THROW(S.solve({1.0, 1.0}), SingularSystem);
}

TEST(DenseFactored, HandSolvedThreeByThree) {
    const auto spec = unit_mu_four();
    const Discretization disc(spec, 4, 4, 1, 1);
    const SolverState s(spec, disc);
    ASSERT_NEAR(s.table().mu(), 4.0, 1e-14);
    Field rhs(4, 4);
    rhs(2, 2) = 1.0;
    // Each factor is tridiag(-1/4, 5/2, -1/4); its solve of e_2 is (0.1, 1, 0.1) / 2.45.
    const double c = 1.0 / (2.45 * 2.45);
    const Field dense = reference::dense_factored_step(s, rhs);
    EXPECT_NEAR(dense(2, 2), c, 1e-15);
    EXPECT_NEAR(dense(1, 2), 0.1 * c, 1e-15);
    EXPECT_NEAR(dense(2, 3), 0.1 * c, 1e-15);
    EXPECT_NEAR(dense(1, 1), 0.01 * c, 1e-15);
    EXPECT_NEAR(dense(3, 3), 0.01 * c, 1e-15);

    SolverState t(spec, disc);
    const Field& adi = y_sweep(t, x_sweep(t, rhs));
    EXPECT_LE(max_abs_diff(adi, dense), 1e-11);
}

TEST(DenseFactored, StencilWeightsOnConstantSpace) {
    // With cross = 1/(4 mu) and a constant grid function the stencil row sums to mu.
    const Discretization disc(zero_case(), 5, 5, 1, 1);
    Field rhs(5, 5), boundary(5, 5, 2.0);
    const auto sys = reference::assemble_dense(disc, 7.0, 1.0 / 28.0, rhs, boundary);
    const std::vector<double> ones(disc.interior_size(), 2.0);
    const auto Ax = sys.matrix.multiply(ones);
    for (std::size_t r = 0; r < Ax.size(); ++r) EXPECT_NEAR(Ax[r] - sys.rhs[r], 14.0, 1e-10);
}

TEST(DenseFactored, ConstantAndZeroCases) {
    for (double c : {0.0, 2.5}) {
        const ProblemSpec spec = c == 0.0 ? zero_case() : constant_case(c);
        const Discretization disc(spec, 6, 7, 8, 3);
        const Field dense = reference::run_dense_factored(spec, disc);
        const Field unsplit = reference::run_unsplit(spec, disc);
        for (double v : dense.values()) EXPECT_NEAR(v, c, 1e-12);
        for (double v : unsplit.values()) EXPECT_NEAR(v, c, 1e-12);
    }
}

TEST(DenseFactored, SizeGuard) {
    const auto spec = example1();
    const Discretization ok(spec, 65, 65, 1, 1);   // 64^2 = 4096 unknowns
    const Discretization big(spec, 66, 66, 1, 1);  // 65^2
    const SolverState s_ok(spec, ok), s_big(spec, big);
    EXPECT_NO_THROW(reference::dense_unsplit_step(s_ok, assemble_rhs_unsplit(s_ok)));
    EXPECT_THROW(reference::dense_factored_step(s_big, assemble_rhs(s_big)), OracleTooLarge);
    EXPECT_THROW(reference::dense_unsplit_step(s_big, assemble_rhs_unsplit(s_big)), OracleTooLarge);
}

TEST(DenseFactored, MatchesAdiOnRandomInitialStates) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t M : {3u, 5u, 9u, 17u}) {
        const auto base = example1();
        const double h = std::numbers::pi / static_cast<double>(M);
        std::vector<double> noise((M + 1) * (M + 1), 0.0);
        for (std::size_t i = 1; i < M; ++i) {
            for (std::size_t j = 1; j < M; ++j) noise[i * (M + 1) + j] = u(rng);
        }
        auto spec = base;
        spec.psi1 = [=](double x, double y) {
            const auto i = static_cast<std::size_t>(std::lround(x / h)), j = static_cast<std::size_t>(std::lround(y / h));
            return base.psi1(x, y) + noise[i * (M + 1) + j];
        };
        const Discretization disc(spec, M, M, 10, 8);
        const Field adi = run(spec, disc);
        const Field dense = reference::run_dense_factored(spec, disc);
        EXPECT_LE(max_abs_diff(adi, dense), 1e-10) << "M=" << M;
    }
}

TEST(Unsplit, DifferenceFromAdiShrinksWithTau) {
    const auto spec = example1();
    double prev = 0.0;
    for (std::size_t N : {4u, 8u, 16u, 32u}) {
        const Discretization disc(spec, 8, 8, N, 8);
        const double d = max_abs_diff(run(spec, disc), reference::run_unsplit(spec, disc));
        EXPECT_GT(d, 0.0);
        if (prev > 0.0) {
            EXPECT_LT(d, prev) << "N=" << N;
        }
        prev = d;
    }
}

TEST(OrderIntegral, PolynomialsAndExample) {
    EXPECT_NEAR(reference::precise_order_integral([](double) { return 1.0; }), 1.0, 1e-14);
    EXPECT_NEAR(reference::precise_order_integral([](double b) { return b; }), 1.5, 1e-14);
    EXPECT_NEAR(reference::precise_order_integral_midpoint([](double b) { return b * b; }), 7.0 / 3.0, 1e-13);
    auto g = [](double b) { return std::tgamma(4.0 - b); };
    const double romberg = reference::precise_order_integral(g);
    const double midpoint = reference::precise_order_integral_midpoint(g);
    EXPECT_NEAR(romberg, midpoint, 1e-12);
    EXPECT_NEAR(romberg, reference::example1_order_integral, 1e-12);
}
