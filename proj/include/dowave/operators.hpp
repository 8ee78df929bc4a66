#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dowave/errors.hpp"
#include "dowave/model.hpp"

namespace dowave {

// ---------------------------------------------------------------------------
// Second-difference stencils. Inputs carry boundary values; results are defined
// on interior nodes and zero on the boundary ring.

/// (u_{i-1,j} - 2 u_ij + u_{i+1,j}) / h1^2
inline Field apply_dxx(const Field& u, double h1) {
    const std::size_t M1 = u.M1(), M2 = u.M2();
    const double s = 1.0 / (h1 * h1);
    Field out(M1, M2);
    for (std::size_t i = 1; i < M1; ++i) {
        for (std::size_t j = 1; j < M2; ++j) out(i, j) = (u(i - 1, j) - 2.0 * u(i, j) + u(i + 1, j)) * s;
    }
    return out;
}

/// (u_{i,j-1} - 2 u_ij + u_{i,j+1}) / h2^2
inline Field apply_dyy(const Field& u, double h2) {
    const std::size_t M1 = u.M1(), M2 = u.M2();
    const double s = 1.0 / (h2 * h2);
    Field out(M1, M2);
    for (std::size_t i = 1; i < M1; ++i) {
        for (std::size_t j = 1; j < M2; ++j) out(i, j) = (u(i, j - 1) - 2.0 * u(i, j) + u(i, j + 1)) * s;
    }
    return out;
}

/// Mixed fourth difference dxx(dyy u) as one 9-point stencil; reads the corners.
inline Field apply_dxxdyy(const Field& u, double h1, double h2) {
    const std::size_t M1 = u.M1(), M2 = u.M2();
    const double s = 1.0 / (h1 * h1 * h2 * h2);
    Field out(M1, M2);
    auto dyy = [&](std::size_t i, std::size_t j) { return u(i, j - 1) - 2.0 * u(i, j) + u(i, j + 1); };
    for (std::size_t i = 1; i < M1; ++i) {
        for (std::size_t j = 1; j < M2; ++j) out(i, j) = (dyy(i - 1, j) - 2.0 * dyy(i, j) + dyy(i + 1, j)) * s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tridiagonal systems

struct TridiagonalSystem {
    std::vector<double> lower;  // n-1, lower[i] couples row i+1 to unknown i
    std::vector<double> diag;   // n
    std::vector<double> upper;  // n-1, upper[i] couples row i to unknown i+1
    std::vector<double> rhs;    // n

    std::size_t size() const { return diag.size(); }
};

/// Smallest row margin |d_i| - |l_{i-1}| - |u_i|; positive iff strictly diagonally dominant.
inline double dominance_margin(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    double margin = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        if (i > 0) off += std::abs(sys.lower[i - 1]);
        if (i + 1 < n) off += std::abs(sys.upper[i]);
        margin = std::min(margin, std::abs(sys.diag[i]) - off);
    }
    return margin;
}

inline bool is_strictly_dominant(const TridiagonalSystem& sys) { return dominance_margin(sys) > 0.0; }

/// Thomas elimination factored once for a fixed coefficient matrix and reused
/// for any number of right-hand sides. No pivoting.
class TridiagonalFactor {
public:
    TridiagonalFactor() = default;

    TridiagonalFactor(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper)
        : lower_(lower.begin(), lower.end()), cprime_(diag.size()), inv_pivot_(diag.size()) {
        const std::size_t n = diag.size();
        if (n == 0) return;
        if (lower.size() + 1 != n || upper.size() + 1 != n) {
            throw ShapeMismatch("tridiagonal bands have inconsistent lengths");
        }
        double prev_c = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pivot = diag[i] - (i > 0 ? lower[i - 1] * prev_c : 0.0);
            if (pivot == 0.0 || !std::isfinite(pivot)) {
                throw SingularSystem("zero pivot in tridiagonal elimination at row " + std::to_string(i));
            }
            inv_pivot_[i] = 1.0 / pivot;
            cprime_[i] = i + 1 < n ? upper[i] * inv_pivot_[i] : 0.0;
            prev_c = cprime_[i];
        }
    }

    explicit TridiagonalFactor(const TridiagonalSystem& sys) : TridiagonalFactor(sys.lower, sys.diag, sys.upper) {}

    std::size_t size() const { return inv_pivot_.size(); }

    /// Solves in place; x[k * stride] holds unknown k.
    void solve(std::span<double> x, std::size_t stride = 1) const {
        const std::size_t n = size();
        if (n == 0) return;
        x[0] *= inv_pivot_[0];
        for (std::size_t k = 1; k < n; ++k) {
            x[k * stride] = (x[k * stride] - lower_[k - 1] * x[(k - 1) * stride]) * inv_pivot_[k];
        }
        for (std::size_t k = n - 1; k-- > 0;) x[k * stride] -= cprime_[k] * x[(k + 1) * stride];
    }

    /// Solves `batch` independent systems sharing this matrix; unknown k of
    /// system b lives at data[k * ld + first + b]. Systems are independent, so
    /// any split of [first, first + batch) gives identical results.
    void solve_batched(std::span<double> data, std::size_t ld, std::size_t first, std::size_t batch) const {
        const std::size_t n = size();
        if (n == 0 || batch == 0) return;
        double* base = data.data() + first;
        for (std::size_t b = 0; b < batch; ++b) base[b] *= inv_pivot_[0];
        for (std::size_t k = 1; k < n; ++k) {
            double* row = base + k * ld;
            const double* prev = base + (k - 1) * ld;
            const double l = lower_[k - 1], ip = inv_pivot_[k];
            for (std::size_t b = 0; b < batch; ++b) row[b] = (row[b] - l * prev[b]) * ip;
        }
        for (std::size_t k = n - 1; k-- > 0;) {
            double* row = base + k * ld;
            const double* next = base + (k + 1) * ld;
            const double c = cprime_[k];
            for (std::size_t b = 0; b < batch; ++b) row[b] -= c * next[b];
        }
    }

private:
    std::vector<double> lower_;
    std::vector<double> cprime_;
    std::vector<double> inv_pivot_;
};

/// Solves sys.x = sys.rhs. The system itself is left untouched.
inline std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    if (sys.rhs.size() != sys.size()) throw ShapeMismatch("rhs length does not match the diagonal");
    std::vector<double> x = sys.rhs;
    TridiagonalFactor(sys).solve(x);
    return x;
}

/// Coefficients of sqrt(mu) I - dxx / (2 sqrt(mu)) on n interior unknowns with spacing h.
/// The rhs is left empty; it is supplied per solve.
inline TridiagonalSystem sweep_matrix(double mu, double h, std::size_t n) {
    const double sm = std::sqrt(mu);
    const double off = -1.0 / (2.0 * sm * h * h);
    const double diag = sm + 1.0 / (sm * h * h);
    TridiagonalSystem sys;
    sys.diag.assign(n, diag);
    sys.lower.assign(n > 0 ? n - 1 : 0, off);
    sys.upper.assign(n > 0 ? n - 1 : 0, off);
    return sys;
}

inline TridiagonalSystem sweep_matrix_x(double mu, double h1, std::size_t n) { return sweep_matrix(mu, h1, n); }
inline TridiagonalSystem sweep_matrix_y(double mu, double h2, std::size_t n) { return sweep_matrix(mu, h2, n); }

}  // namespace dowave
