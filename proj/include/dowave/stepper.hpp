#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dowave/coefficients.hpp"
#include "dowave/errors.hpp"
#include "dowave/model.hpp"
#include "dowave/operators.hpp"
#include "dowave/parallel.hpp"

namespace dowave {

/// Append-only store of interior difference fields d^k = u^k - u^(k-1), k = 1..n.
/// Interior node (i, j) is stored at (i - 1) * (M2 - 1) + (j - 1).
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    explicit HistoryBuffer(std::size_t interior) : interior_(interior) {}

    std::size_t size() const { return diffs_.size(); }
    std::size_t interior_size() const { return interior_; }

    void reserve(std::size_t steps) { diffs_.reserve(steps); }
    void append(std::vector<double> d) {
        if (d.size() != interior_) throw ShapeMismatch("history difference has the wrong interior size");
        diffs_.push_back(std::move(d));
    }

    /// d^k for 1 <= k <= size().
    std::span<const double> diff(std::size_t k) const { return diffs_[k - 1]; }

private:
    std::size_t interior_ = 0;
    std::vector<std::vector<double>> diffs_;
};

/// Bytes held by the history after N steps on this grid.
inline double history_bytes(const Discretization& disc) {
    return static_cast<double>(disc.N()) * static_cast<double>(disc.interior_size()) * sizeof(double);
}

struct StepOptions {
    std::size_t threads = 1;
};

/// Everything the stepper carries from one time level to the next.
class SolverState {
public:
    SolverState(ProblemSpec spec, const Discretization& disc)
        : spec_(std::move(spec)), disc_(disc), table_(spec_, disc_), history_(disc.interior_size()) {
        validate(spec_, disc_, table_.betas());
        current_ = Field(disc_.M1(), disc_.M2());
        for (std::size_t i = 0; i <= disc_.M1(); ++i) {
            for (std::size_t j = 0; j <= disc_.M2(); ++j) {
                const double x = disc_.x(i), y = disc_.y(j);
                current_(i, j) = on_boundary(disc_, i, j) ? spec_.phi(x, y, 0.0) : spec_.psi1(x, y);
            }
        }
        psi2_.resize(disc_.interior_size());
        for (std::size_t i = 1; i < disc_.M1(); ++i) {
            for (std::size_t j = 1; j < disc_.M2(); ++j) psi2_[interior_index(i, j)] = spec_.psi2(disc_.x(i), disc_.y(j));
        }
        if (!current_.all_finite()) throw InvalidProblem("initial data is not finite");
        const double mu = table_.mu();
        x_factor_ = TridiagonalFactor(sweep_matrix_x(mu, disc_.h1(), disc_.M1() - 1));
        y_factor_ = TridiagonalFactor(sweep_matrix_y(mu, disc_.h2(), disc_.M2() - 1));
        history_.reserve(disc_.N());
    }

    const ProblemSpec& spec() const { return spec_; }
    const Discretization& disc() const { return disc_; }
    const CoefficientTable& table() const { return table_; }
    const HistoryBuffer& history() const { return history_; }

    /// Index n of the time level held in current().
    std::size_t step() const { return step_; }
    double time() const { return disc_.t(step_); }
    const Field& current() const { return current_; }

    /// psi2 at interior nodes, interior indexing.
    std::span<const double> psi2() const { return psi2_; }

    std::size_t interior_index(std::size_t i, std::size_t j) const { return (i - 1) * (disc_.M2() - 1) + (j - 1); }

    const TridiagonalFactor& x_factor() const { return x_factor_; }
    const TridiagonalFactor& y_factor() const { return y_factor_; }

    /// Installs u^(n+1) (boundary included), records its difference and advances n.
    void advance(Field next) {
        if (!next.same_shape(current_)) throw ShapeMismatch("advance: field shape differs from the state");
        if (step_ >= disc_.N()) throw Error("advance: already at the final time level");
        if (!next.all_finite()) throw Error("non-finite value in the solution");
        std::vector<double> d(disc_.interior_size());
        for (std::size_t i = 1; i < disc_.M1(); ++i) {
            for (std::size_t j = 1; j < disc_.M2(); ++j) d[interior_index(i, j)] = next(i, j) - current_(i, j);
        }
        history_.append(std::move(d));
        current_ = std::move(next);
        ++step_;
    }

private:
    ProblemSpec spec_;
    Discretization disc_;
    CoefficientTable table_;
    Field current_;
    HistoryBuffer history_;
    std::vector<double> psi2_;
    TridiagonalFactor x_factor_;
    TridiagonalFactor y_factor_;
    std::size_t step_ = 0;
};

inline SolverState init(const ProblemSpec& spec, const Discretization& disc) { return SolverState(spec, disc); }

/// Memory term sum_{k=1}^{n} W_{n+1-k} d^k at interior nodes (interior indexing),
/// for the step from n = state.step() to n + 1. k runs ascending for every node.
inline std::vector<double> history_term(const SolverState& state, std::size_t threads = 1) {
    const auto& hist = state.history();
    const auto& table = state.table();
    const std::size_t n = hist.size();
    std::vector<double> acc(hist.interior_size(), 0.0);
    constexpr std::size_t tile = 2048;
    parallel_for(0, acc.size(), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t t0 = b; t0 < e; t0 += tile) {
            const std::size_t t1 = std::min(e, t0 + tile);
            double* out = acc.data();
            for (std::size_t k = 1; k <= n; ++k) {
                const double w = table.W(n + 1 - k);
                const double* d = hist.diff(k).data();
                for (std::size_t q = t0; q < t1; ++q) out[q] += w * d[q];
            }
        }
    });
    return acc;
}

namespace detail {

/// rhs of the step n -> n+1 at interior nodes; `with_perturbation` toggles the
/// (1/4mu) dxx dyy u^n term that makes the left operator factor.
inline Field assemble_rhs(const SolverState& state, bool with_perturbation, std::size_t threads) {
    const auto& disc = state.disc();
    const auto& table = state.table();
    const auto& spec = state.spec();
    const std::size_t n = state.step();
    if (n + 1 > disc.N()) throw Error("assemble_rhs: no step left after the final time level");

    const std::size_t M1 = disc.M1(), M2 = disc.M2();
    const double mu = table.mu();
    const double sx = 1.0 / (disc.h1() * disc.h1());
    const double sy = 1.0 / (disc.h2() * disc.h2());
    const double cross = with_perturbation ? sx * sy / (4.0 * mu) : 0.0;
    const double s_next = table.s(n + 1);
    const double t_n = disc.t(n);
    const Field& u = state.current();
    const auto psi2 = state.psi2();
    const std::vector<double> memory = history_term(state, threads);

    Field rhs(M1, M2);
    parallel_for(1, M1, threads, [&](std::size_t ib, std::size_t ie) {
        auto dyy = [&](std::size_t i, std::size_t j) { return u(i, j - 1) - 2.0 * u(i, j) + u(i, j + 1); };
        for (std::size_t i = ib; i < ie; ++i) {
            for (std::size_t j = 1; j < M2; ++j) {
                const double c = u(i, j);
                const double dxx = (u(i - 1, j) - 2.0 * c + u(i + 1, j)) * sx;
                const double dyy_c = dyy(i, j);
                const double mixed = dyy(i - 1, j) - 2.0 * dyy_c + dyy(i + 1, j);
                const std::size_t q = state.interior_index(i, j);
                double v = mu * c + 0.5 * dxx + 0.5 * dyy_c * sy + cross * mixed;
                v += memory[q];
                v += s_next * psi2[q];
                v += spec.source(disc.x(i), disc.y(j), t_n, c);
                rhs(i, j) = v;
            }
        }
    });
    return rhs;
}

}  // namespace detail

/// Right-hand side of the step from t_n to t_{n+1} at interior nodes:
///   (sqrt(mu) I + dxx/2sqrt(mu)) (sqrt(mu) I + dyy/2sqrt(mu)) u^n
///     + sum_{k=1}^{n} W_{n+1-k} d^k + s_{n+1} psi2 + f(x, y, t_n, u^n).
/// Boundary entries of the result are zero.
inline Field assemble_rhs(const SolverState& state, const StepOptions& opt = {}) {
    return detail::assemble_rhs(state, true, opt.threads);
}

/// Same as assemble_rhs without the (1/4mu) dxx dyy u^n term: the rhs of the
/// unsplit scheme.
inline Field assemble_rhs_unsplit(const SolverState& state, const StepOptions& opt = {}) {
    return detail::assemble_rhs(state, false, opt.threads);
}

/// Boundary values phi(., ., t) on the boundary ring, zero inside.
inline Field boundary_values(const ProblemSpec& spec, const Discretization& disc, double t) {
    Field b(disc.M1(), disc.M2());
    for (std::size_t i = 0; i <= disc.M1(); ++i) {
        for (std::size_t j = 0; j <= disc.M2(); ++j) {
            if (on_boundary(disc, i, j)) b(i, j) = spec.phi(disc.x(i), disc.y(j), t);
        }
    }
    return b;
}

/// Solves (sqrt(mu) I - dxx/2sqrt(mu)) u* = rhs along x for every interior j.
/// The boundary columns are u*_{0j} = (sqrt(mu) I - dyy/2sqrt(mu)) phi(0, y_j, t_{n+1})
/// and likewise at i = M1; corner entries of u* are unused and left zero.
inline Field x_sweep(const SolverState& state, const Field& rhs, const StepOptions& opt = {}) {
    const auto& disc = state.disc();
    const std::size_t M1 = disc.M1(), M2 = disc.M2();
    if (rhs.M1() != M1 || rhs.M2() != M2) throw ShapeMismatch("x_sweep: rhs shape differs from the grid");
    const double sm = std::sqrt(state.table().mu());
    const double cy = 1.0 / (2.0 * sm * disc.h2() * disc.h2());
    const double cx = 1.0 / (2.0 * sm * disc.h1() * disc.h1());
    const Field bnd = boundary_values(state.spec(), disc, disc.t(state.step() + 1));

    Field ustar(M1, M2);
    for (std::size_t j = 1; j < M2; ++j) {
        for (std::size_t i : {std::size_t{0}, M1}) {
            ustar(i, j) = sm * bnd(i, j) - cy * (bnd(i, j - 1) - 2.0 * bnd(i, j) + bnd(i, j + 1));
        }
    }
    for (std::size_t i = 1; i < M1; ++i) {
        for (std::size_t j = 1; j < M2; ++j) ustar(i, j) = rhs(i, j);
    }
    for (std::size_t j = 1; j < M2; ++j) {
        ustar(1, j) += cx * ustar(0, j);
        ustar(M1 - 1, j) += cx * ustar(M1, j);
    }
    const std::size_t ld = M2 + 1;
    auto data = ustar.values();
    parallel_for(1, M2, opt.threads, [&](std::size_t jb, std::size_t je) {
        state.x_factor().solve_batched(data, ld, ld + jb, je - jb);
    });
    return ustar;
}

/// Solves (sqrt(mu) I - dyy/2sqrt(mu)) u^{n+1} = u* along y for every interior i,
/// sets the boundary from phi(., ., t_{n+1}), and advances the state.
inline const Field& y_sweep(SolverState& state, const Field& ustar, const StepOptions& opt = {}) {
    const auto& disc = state.disc();
    const std::size_t M1 = disc.M1(), M2 = disc.M2();
    if (ustar.M1() != M1 || ustar.M2() != M2) throw ShapeMismatch("y_sweep: u* shape differs from the grid");
    const double sm = std::sqrt(state.table().mu());
    const double cy = 1.0 / (2.0 * sm * disc.h2() * disc.h2());

    Field next = boundary_values(state.spec(), disc, disc.t(state.step() + 1));
    for (std::size_t i = 1; i < M1; ++i) {
        for (std::size_t j = 1; j < M2; ++j) next(i, j) = ustar(i, j);
        next(i, 1) += cy * next(i, 0);
        next(i, M2 - 1) += cy * next(i, M2);
    }
    auto data = next.values();
    parallel_for(1, M1, opt.threads, [&](std::size_t ib, std::size_t ie) {
        for (std::size_t i = ib; i < ie; ++i) state.y_factor().solve(data.subspan(i * (M2 + 1) + 1, M2 - 1));
    });
    state.advance(std::move(next));
    return state.current();
}

/// One full ADI step n -> n+1.
inline const Field& step(SolverState& state, const StepOptions& opt = {}) {
    const Field rhs = assemble_rhs(state, opt);
    const Field ustar = x_sweep(state, rhs, opt);
    return y_sweep(state, ustar, opt);
}

/// Receives (n, t_n, u^n) after every step.
using Observer = std::function<void(std::size_t, double, const Field&)>;

/// Marches from t_0 to T. Errors raised inside a step are rethrown as StepFailure.
inline Field run(const ProblemSpec& spec, const Discretization& disc, const Observer& observer = {},
                 const StepOptions& opt = {}) {
    SolverState state(spec, disc);
    while (state.step() < disc.N()) {
        const std::size_t target = state.step() + 1;
        try {
            step(state, opt);
        } catch (const StepFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw StepFailure(target, e.what());
        }
        if (observer) observer(state.step(), state.time(), state.current());
    }
    return state.current();
}

}  // namespace dowave
