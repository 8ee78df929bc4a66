#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dowave/model.hpp"
#include "dowave/operators.hpp"

using namespace dowave;

namespace {

constexpr double pi = std::numbers::pi;

Field sample_grid(std::size_t M1, std::size_t M2, double h1, double h2, auto&& g) {
    Field f(M1, M2);
    for (std::size_t i = 0; i <= M1; ++i) {
        for (std::size_t j = 0; j <= M2; ++j) f(i, j) = g(static_cast<double>(i) * h1, static_cast<double>(j) * h2);
    }
    return f;
}

Field random_field(std::size_t M1, std::size_t M2, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(M1, M2);
    for (auto& v : f.values()) v = u(rng);
    return f;
}

// Dense Gaussian elimination with partial pivoting, test-local.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(A[r][k]) > std::abs(A[p][k])) p = r;
        }
        std::swap(A[k], A[p]);
        std::swap(b[k], b[p]);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A[r][k] / A[k][k];
            for (std::size_t c = k; c < n; ++c) A[r][c] -= f * A[k][c];
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double acc = b[k];
        for (std::size_t c = k + 1; c < n; ++c) acc -= A[k][c] * x[c];
        x[k] = acc / A[k][k];
    }
    return x;
}

std::vector<std::vector<double>> to_dense(const TridiagonalSystem& s) {
    const std::size_t n = s.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        A[i][i] = s.diag[i];
        if (i > 0) A[i][i - 1] = s.lower[i - 1];
        if (i + 1 < n) A[i][i + 1] = s.upper[i];
    }
    return A;
}

TridiagonalSystem random_dominant(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TridiagonalSystem s;
    s.lower.resize(n - 1);
    s.upper.resize(n - 1);
    s.diag.resize(n);
    s.rhs.resize(n);
    for (auto& v : s.lower) v = u(rng);
    for (auto& v : s.upper) v = u(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(s.lower[i - 1]) : 0.0) + (i + 1 < n ? std::abs(s.upper[i]) : 0.0);
        s.diag[i] = (u(rng) < 0.0 ? -1.0 : 1.0) * (off + 0.05 + std::abs(u(rng)));
        s.rhs[i] = 10.0 * u(rng);
    }
    return s;
}

}  // namespace

TEST(Stencil, DxxExactOnQuadratics) {
    const double h = 0.37;
    const Field u = sample_grid(6, 5, h, 0.2, [](double x, double) { return x * x; });
    const Field d = apply_dxx(u, h);
    for (std::size_t i = 1; i < 6; ++i) {
        for (std::size_t j = 1; j < 5; ++j) EXPECT_NEAR(d(i, j), 2.0, 1e-12);
    }
    EXPECT_EQ(d(0, 2), 0.0);
    EXPECT_EQ(d(6, 2), 0.0);
}

TEST(Stencil, ConstantsAreAnnihilated) {
    const Field u(5, 7, 2.5);
    for (const Field& d : {apply_dxx(u, 0.3), apply_dyy(u, 0.2), apply_dxxdyy(u, 0.3, 0.2)}) {
        for (double v : d.values()) EXPECT_EQ(v, 0.0);
    }
}

TEST(Stencil, DxxOfSine) {
    const double h = pi / 4;
    const Field u = sample_grid(4, 4, h, h, [](double x, double) { return std::sin(x); });
    // (2 cos(pi/4) - 2) / (pi/4)^2, 40-digit reference.
    EXPECT_NEAR(apply_dxx(u, h)(2, 2), -0.94964120355178363474, 1e-14);
}

TEST(Stencil, DyyMirrorsDxx) {
    const double h = pi / 4;
    const Field u = sample_grid(4, 4, h, h, [](double, double y) { return std::sin(y); });
    EXPECT_NEAR(apply_dyy(u, h)(2, 2), -0.94964120355178363474, 1e-14);
    const Field q = sample_grid(5, 6, 0.1, 0.3, [](double, double y) { return y * y; });
    const Field d = apply_dyy(q, 0.3);
    for (std::size_t i = 1; i < 5; ++i) {
        for (std::size_t j = 1; j < 6; ++j) EXPECT_NEAR(d(i, j), 2.0, 1e-12);
    }
}

TEST(Stencil, MixedExactOnBiquadratics) {
    const double h1 = 0.25, h2 = 0.4;
    const Field u = sample_grid(7, 6, h1, h2, [](double x, double y) { return x * x * y * y; });
    const Field d = apply_dxxdyy(u, h1, h2);
    for (std::size_t i = 1; i < 7; ++i) {
        for (std::size_t j = 1; j < 6; ++j) EXPECT_NEAR(d(i, j), 4.0, 1e-11);
    }
    const Field xonly = sample_grid(7, 6, h1, h2, [](double x, double) { return std::exp(x); });
    const Field mixed = apply_dxxdyy(xonly, h1, h2);
    for (double v : mixed.values()) EXPECT_NEAR(v, 0.0, 1e-11);
}

TEST(Stencil, MixedEqualsCompositionsInEitherOrder) {
    std::mt19937_64 rng(3);
    const double h1 = 0.3, h2 = 0.45;
    for (int t = 0; t < 20; ++t) {
        const Field u = random_field(9, 11, rng);
        const Field mixed = apply_dxxdyy(u, h1, h2);
        // Compose on the full grid: dyy then dxx needs dyy on boundary columns too.
        Field dy(9, 11);
        for (std::size_t i = 0; i <= 9; ++i) {
            for (std::size_t j = 1; j < 11; ++j) dy(i, j) = (u(i, j - 1) - 2 * u(i, j) + u(i, j + 1)) / (h2 * h2);
        }
        Field dx(9, 11);
        for (std::size_t i = 1; i < 9; ++i) {
            for (std::size_t j = 0; j <= 11; ++j) dx(i, j) = (u(i - 1, j) - 2 * u(i, j) + u(i + 1, j)) / (h1 * h1);
        }
        const Field xy = apply_dxx(dy, h1);
        const Field yx = apply_dyy(dx, h2);
        for (std::size_t i = 1; i < 9; ++i) {
            for (std::size_t j = 1; j < 11; ++j) {
                const double scale = 1.0 / (h1 * h1 * h2 * h2);
                EXPECT_NEAR(mixed(i, j), xy(i, j), 1e-13 * scale);
                EXPECT_NEAR(mixed(i, j), yx(i, j), 1e-13 * scale);
            }
        }
    }
}

TEST(Stencil, Linearity) {
    std::mt19937_64 rng(11);
    const double h1 = 0.2, h2 = 0.35, a = 1.7, b = -0.6;
    for (int t = 0; t < 20; ++t) {
        const Field u = random_field(8, 6, rng), v = random_field(8, 6, rng);
        Field w(8, 6);
        for (std::size_t q = 0; q < w.size(); ++q) w.values()[q] = a * u.values()[q] + b * v.values()[q];
        const Field lx = apply_dxx(w, h1), ux = apply_dxx(u, h1), vx = apply_dxx(v, h1);
        const Field ly = apply_dyy(w, h2), uy = apply_dyy(u, h2), vy = apply_dyy(v, h2);
        for (std::size_t q = 0; q < w.size(); ++q) {
            EXPECT_NEAR(lx.values()[q], a * ux.values()[q] + b * vx.values()[q], 1e-13 / (h1 * h1));
            EXPECT_NEAR(ly.values()[q], a * uy.values()[q] + b * vy.values()[q], 1e-13 / (h2 * h2));
        }
    }
}

TEST(Thomas, Identity) {
    TridiagonalSystem s{{0.0, 0.0}, {1.0, 1.0, 1.0}, {0.0, 0.0}, {3.0, -2.0, 5.5}};
    EXPECT_EQ(thomas_solve(s), s.rhs);
}

TEST(Thomas, TwoBySymmetric) {
    TridiagonalSystem s{{-1.0}, {2.0, 2.0}, {-1.0}, {1.0, 1.0}};
    const auto x = thomas_solve(s);
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(Thomas, LeavesInputsUntouched) {
    std::mt19937_64 rng(5);
    const TridiagonalSystem s = random_dominant(30, rng);
    const TridiagonalSystem copy = s;
    (void)thomas_solve(s);
    EXPECT_EQ(s.lower, copy.lower);
    EXPECT_EQ(s.diag, copy.diag);
    EXPECT_EQ(s.upper, copy.upper);
    EXPECT_EQ(s.rhs, copy.rhs);
}

TEST(Thomas, MatchesDenseOnRandomDominantSystems) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> len(2, 200);
    for (int t = 0; t < 1000; ++t) {
        const TridiagonalSystem s = random_dominant(len(rng), rng);
        ASSERT_TRUE(is_strictly_dominant(s));
        const auto x = thomas_solve(s);
        const auto y = dense_solve(to_dense(s), s.rhs);
        double ymax = 0.0;
        for (double v : y) ymax = std::max(ymax, std::abs(v));
        for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(x[i], y[i], 1e-10 * ymax) << "trial " << t;

        // residual bound
        double rmax = 0.0, res = 0.0;
        for (double v : s.rhs) rmax = std::max(rmax, std::abs(v));
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = s.diag[i] * x[i] - s.rhs[i];
            if (i > 0) r += s.lower[i - 1] * x[i - 1];
            if (i + 1 < x.size()) r += s.upper[i] * x[i + 1];
            res = std::max(res, std::abs(r));
        }
        ASSERT_LE(res, 1e-12 * (rmax + 1.0));
    }
}

TEST(Thomas, ZeroPivotIsReported) {
    TridiagonalSystem s{{1.0}, {0.0, 1.0}, {1.0}, {1.0, 1.0}};
    EXPECT_THROW(thomas_solve(s), SingularSystem);
}

TEST(Thomas, BatchedAndStridedAgreeWithContiguous) {
    std::mt19937_64 rng(9);
    const TridiagonalSystem s = random_dominant(13, rng);
    const TridiagonalFactor f(s);
    const std::size_t batch = 5, ld = 7;  // padding columns around the batch
    std::vector<double> data(13 * ld, 0.0);
    std::vector<std::vector<double>> rhs(batch);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t b = 0; b < batch; ++b) {
        rhs[b].resize(13);
        for (std::size_t k = 0; k < 13; ++k) data[k * ld + 1 + b] = rhs[b][k] = u(rng);
    }
    std::vector<double> strided = data;
    f.solve_batched(data, ld, 1, batch);
    for (std::size_t b = 0; b < batch; ++b) {
        std::vector<double> x = rhs[b];
        f.solve(x);
        f.solve(std::span<double>(strided).subspan(1 + b), ld);
        for (std::size_t k = 0; k < 13; ++k) {
            EXPECT_EQ(data[k * ld + 1 + b], x[k]);
            EXPECT_EQ(strided[k * ld + 1 + b], x[k]);
        }
    }
}

TEST(SweepMatrix, PlugIn) {
    const auto s = sweep_matrix_x(4.0, 1.0, 5);
    for (double d : s.diag) EXPECT_DOUBLE_EQ(d, 2.5);
    for (double o : s.lower) EXPECT_DOUBLE_EQ(o, -0.25);
    for (double o : s.upper) EXPECT_DOUBLE_EQ(o, -0.25);
    EXPECT_EQ(s.diag.size(), 5u);
    EXPECT_EQ(s.lower.size(), 4u);
    EXPECT_TRUE(s.rhs.empty());
}

TEST(SweepMatrix, Example1Coefficients) {
    const auto s = sweep_matrix_x(3.0 * std::sqrt(2.0), pi / 16, 15);
    // 40-digit references.
    EXPECT_NEAR(s.diag[0], 14.652560989155537954, 1e-12);
    EXPECT_NEAR(s.lower[0], -6.2963969226242100991, 1e-12);
}

TEST(SweepMatrix, DominanceMarginIsSqrtMu) {
    for (double mu : {1e-3, 0.7, 4.0, 4.2e4}) {
        for (double h : {1e-3, 0.05, 1.0}) {
            const auto s = sweep_matrix_y(mu, h, 9);
            const double interior = std::abs(s.diag[4]) - std::abs(s.lower[3]) - std::abs(s.upper[4]);
            EXPECT_NEAR(interior, std::sqrt(mu), 1e-9 * s.diag[4]);
            EXPECT_TRUE(is_strictly_dominant(s));
            EXPECT_GT(s.diag[0], 0.0);
            EXPECT_LT(s.upper[0], 0.0);
        }
    }
}

TEST(SweepMatrix, ThomasMatchesDenseUpTo64) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t M : {2u, 5u, 16u, 33u, 64u}) {
        auto s = sweep_matrix_x(35.7, pi / static_cast<double>(M), M - 1);
        s.rhs.resize(M - 1);
        for (auto& v : s.rhs) v = u(rng);
        const auto x = thomas_solve(s);
        const auto y = dense_solve(to_dense(s), s.rhs);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-11);
    }
}
