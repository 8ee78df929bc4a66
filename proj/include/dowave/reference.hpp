#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dowave/errors.hpp"
#include "dowave/model.hpp"
#include "dowave/stepper.hpp"

// Independent oracles for the production stepper. Nothing here calls the
// tridiagonal solver or the ADI sweeps.

namespace dowave::reference {

/// Largest interior system the dense oracles accept.
inline constexpr std::size_t max_dense_unknowns = 4096;

/// Row-major square matrix with a Gaussian-elimination solve (partial pivoting).
class DenseMatrix {
public:
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

    /// Smallest |a_rr| - sum_{c != r} |a_rc| over all rows.
    double dominance_margin() const {
        double margin = INFINITY;
        for (std::size_t r = 0; r < n_; ++r) {
            double off = 0.0;
            for (std::size_t c = 0; c < n_; ++c) {
                if (c != r) off += std::abs((*this)(r, c));
            }
            margin = std::min(margin, std::abs((*this)(r, r)) - off);
        }
        return margin;
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (std::size_t r = 0; r < n_; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c) * x[c];
            y[r] = acc;
        }
        return y;
    }

    std::vector<double> solve(std::vector<double> b) const {
        if (b.size() != n_) throw ShapeMismatch("dense solve: rhs length mismatch");
        std::vector<double> a = a_;
        auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n_ + c]; };
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < n_; ++r) {
                if (std::abs(at(r, k)) > std::abs(at(piv, k))) piv = r;
            }
            if (at(piv, k) == 0.0) throw SingularSystem("dense solve: singular matrix at column " + std::to_string(k));
            if (piv != k) {
                for (std::size_t c = 0; c < n_; ++c) std::swap(at(k, c), at(piv, c));
                std::swap(b[k], b[piv]);
            }
            const double inv = 1.0 / at(k, k);
            for (std::size_t r = k + 1; r < n_; ++r) {
                const double f = at(r, k) * inv;
                if (f == 0.0) continue;
                for (std::size_t c = k; c < n_; ++c) at(r, c) -= f * at(k, c);
                b[r] -= f * b[k];
            }
        }
        std::vector<double> x(n_);
        for (std::size_t k = n_; k-- > 0;) {
            double acc = b[k];
            for (std::size_t c = k + 1; c < n_; ++c) acc -= at(k, c) * x[c];
            x[k] = acc / at(k, k);
        }
        return x;
    }

private:
    std::size_t n_;
    std::vector<double> a_;
};

/// Interior system A u = b for the operator
///   mu I - dxx/2 - dyy/2 + cross * dxx dyy
/// with boundary values of u moved into b.
struct DenseSystem {
    DenseMatrix matrix;
    std::vector<double> rhs;
};

inline DenseSystem assemble_dense(const Discretization& disc, double mu, double cross, const Field& rhs,
                                  const Field& boundary) {
    const std::size_t M1 = disc.M1(), M2 = disc.M2();
    const std::size_t n = disc.interior_size();
    if (n > max_dense_unknowns) {
        throw OracleTooLarge("dense oracle limited to " + std::to_string(max_dense_unknowns) + " unknowns, got " +
                             std::to_string(n));
    }
    const double sx = 1.0 / (disc.h1() * disc.h1());
    const double sy = 1.0 / (disc.h2() * disc.h2());

    // Stencil weights indexed [di + 1][dj + 1].
    double w[3][3] = {};
    w[1][1] = mu + sx + sy + 4.0 * cross * sx * sy;
    w[0][1] = w[2][1] = -0.5 * sx - 2.0 * cross * sx * sy;
    w[1][0] = w[1][2] = -0.5 * sy - 2.0 * cross * sx * sy;
    w[0][0] = w[0][2] = w[2][0] = w[2][2] = cross * sx * sy;

    DenseSystem sys{DenseMatrix(n), std::vector<double>(n)};
    auto index = [&](std::size_t i, std::size_t j) { return (i - 1) * (M2 - 1) + (j - 1); };
    for (std::size_t i = 1; i < M1; ++i) {
        for (std::size_t j = 1; j < M2; ++j) {
            const std::size_t r = index(i, j);
            double b = rhs(i, j);
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const double c = w[di + 1][dj + 1];
                    if (c == 0.0) continue;
                    const std::size_t ii = static_cast<std::size_t>(static_cast<long>(i) + di);
                    const std::size_t jj = static_cast<std::size_t>(static_cast<long>(j) + dj);
                    if (on_boundary(disc, ii, jj)) {
                        b -= c * boundary(ii, jj);
                    } else {
                        sys.matrix(r, index(ii, jj)) += c;
                    }
                }
            }
            sys.rhs[r] = b;
        }
    }
    return sys;
}

namespace detail {

inline Field unpack(const Discretization& disc, const std::vector<double>& x, const Field& boundary) {
    Field out = boundary;
    for (std::size_t i = 1; i < disc.M1(); ++i) {
        for (std::size_t j = 1; j < disc.M2(); ++j) out(i, j) = x[(i - 1) * (disc.M2() - 1) + (j - 1)];
    }
    return out;
}

}  // namespace detail

/// One-shot solve of the factored per-step system
///   (sqrt(mu) I - dxx/2sqrt(mu)) (sqrt(mu) I - dyy/2sqrt(mu)) u^{n+1} = rhs
/// with boundary data phi(., ., t_{n+1}). Returns u^{n+1} including its boundary.
///
/// The product matrix is not diagonally dominant in general; its two factors
/// are (margin sqrt(mu)), which is asserted instead.
inline Field dense_factored_step(const SolverState& state, const Field& rhs) {
    const auto& disc = state.disc();
    const double mu = state.table().mu();
    if (!(dominance_margin(sweep_matrix_x(mu, disc.h1(), disc.M1() - 1)) > 0.0) ||
        !(dominance_margin(sweep_matrix_y(mu, disc.h2(), disc.M2() - 1)) > 0.0)) {
        throw SingularSystem("factored operator lost diagonal dominance");
    }
    const Field boundary = boundary_values(state.spec(), disc, disc.t(state.step() + 1));
    const DenseSystem sys = assemble_dense(disc, mu, 1.0 / (4.0 * mu), rhs, boundary);
    return detail::unpack(disc, sys.matrix.solve(sys.rhs), boundary);
}

/// One-shot solve of the unsplit scheme (mu I - dxx/2 - dyy/2) u^{n+1} = rhs,
/// with rhs from assemble_rhs_unsplit. The matrix is asserted strictly
/// diagonally dominant (margin mu).
inline Field dense_unsplit_step(const SolverState& state, const Field& rhs_without_perturbation) {
    const auto& disc = state.disc();
    const double mu = state.table().mu();
    const Field boundary = boundary_values(state.spec(), disc, disc.t(state.step() + 1));
    const DenseSystem sys = assemble_dense(disc, mu, 0.0, rhs_without_perturbation, boundary);
    if (!(sys.matrix.dominance_margin() > 0.0)) throw SingularSystem("unsplit matrix is not diagonally dominant");
    return detail::unpack(disc, sys.matrix.solve(sys.rhs), boundary);
}

/// Full trajectory of the unsplit scheme; returns u^N.
inline Field run_unsplit(const ProblemSpec& spec, const Discretization& disc) {
    SolverState state(spec, disc);
    while (state.step() < disc.N()) {
        Field next = dense_unsplit_step(state, assemble_rhs_unsplit(state));
        state.advance(std::move(next));
    }
    return state.current();
}

/// Full trajectory with every step solved by dense_factored_step; returns u^N.
inline Field run_dense_factored(const ProblemSpec& spec, const Discretization& disc) {
    SolverState state(spec, disc);
    while (state.step() < disc.N()) {
        Field next = dense_factored_step(state, assemble_rhs(state));
        state.advance(std::move(next));
    }
    return state.current();
}

/// Romberg integration of p over [1, 2] (trapezoid refinement with Richardson
/// extrapolation), stopped when successive diagonal entries differ by <= tol.
inline double precise_order_integral(const std::function<double(double)>& p, double tol = 1e-13,
                                     std::size_t max_levels = 24) {
    std::vector<double> prev, cur;
    double h = 1.0;
    prev.push_back(0.5 * h * (p(1.0) + p(2.0)));
    for (std::size_t level = 1; level <= max_levels; ++level) {
        h *= 0.5;
        const std::size_t fresh = std::size_t{1} << (level - 1);
        double acc = 0.0;
        for (std::size_t q = 0; q < fresh; ++q) acc += p(1.0 + (2.0 * static_cast<double>(q) + 1.0) * h);
        cur.assign(level + 1, 0.0);
        cur[0] = 0.5 * prev[0] + h * acc;
        double factor = 1.0;
        for (std::size_t m = 1; m <= level; ++m) {
            factor *= 4.0;
            cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
        }
        if (level >= 3 && std::abs(cur[level] - prev[level - 1]) <= tol * std::max(1.0, std::abs(cur[level]))) {
            return cur[level];
        }
        std::swap(prev, cur);
    }
    throw OracleFailure("order integral did not converge within " + std::to_string(max_levels) + " levels");
}

/// Second, independent route: composite midpoint sums on tripled panels with
/// Richardson extrapolation in (1/3)^2.
inline double precise_order_integral_midpoint(const std::function<double(double)>& p, double tol = 1e-13,
                                              std::size_t max_levels = 14) {
    auto midpoint = [&](std::size_t panels) {
        const double h = 1.0 / static_cast<double>(panels);
        double acc = 0.0;
        for (std::size_t q = 0; q < panels; ++q) acc += p(1.0 + (static_cast<double>(q) + 0.5) * h);
        return acc * h;
    };
    std::vector<double> prev{midpoint(1)}, cur;
    std::size_t panels = 1;
    for (std::size_t level = 1; level <= max_levels; ++level) {
        panels *= 3;
        cur.assign(level + 1, 0.0);
        cur[0] = midpoint(panels);
        double factor = 1.0;
        for (std::size_t m = 1; m <= level; ++m) {
            factor *= 9.0;
            cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
        }
        if (level >= 3 && std::abs(cur[level] - prev[level - 1]) <= tol * std::max(1.0, std::abs(cur[level]))) {
            return cur[level];
        }
        std::swap(prev, cur);
    }
    throw OracleFailure("midpoint order integral did not converge within " + std::to_string(max_levels) + " levels");
}

/// int_1^2 Gamma(4 - b) db, agreed by both refinement routes and by a 40-digit
/// reference evaluation.
inline constexpr double example1_order_integral = 1.3852813821466495737;

}  // namespace dowave::reference
