#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dowave/errors.hpp"

namespace dowave {

using WeightFn = std::function<double(double beta)>;
using SpatialFn = std::function<double(double x, double y)>;
using SpaceTimeFn = std::function<double(double x, double y, double t)>;
using SourceFn = std::function<double(double x, double y, double t, double u)>;

/// Continuous problem on (0,L1)x(0,L2)x(0,T]:
///
///   int_1^2 weight(b) D^b u db = u_xx + u_yy + source(x, y, t, u)
///   u(.,.,0) = psi1, u_t(.,.,0) = psi2, u = phi on the boundary,
///
/// with D^b the Caputo derivative of order b in (1,2).
struct ProblemSpec {
    std::string name;
    WeightFn weight;
    double L1 = std::numbers::pi;
    double L2 = std::numbers::pi;
    double T = 0.5;
    SpatialFn psi1;
    SpatialFn psi2;
    SpaceTimeFn phi;
    SourceFn source;
    /// Lipschitz constant of the source in u. Reported only, never enforced.
    double lipschitz = 1.0;
    /// Closed-form solution when one is known; empty otherwise.
    SpaceTimeFn exact;

    bool has_exact() const { return static_cast<bool>(exact); }
};

/// Uniform grid sizes. Step sizes are derived from the domain and never set directly.
class Discretization {
public:
    Discretization(const ProblemSpec& spec, std::size_t M1, std::size_t M2, std::size_t N, std::size_t K)
        : Discretization(spec.L1, spec.L2, spec.T, M1, M2, N, K) {}

    Discretization(double L1, double L2, double T, std::size_t M1, std::size_t M2, std::size_t N,
                   std::size_t K)
        : M1_(M1), M2_(M2), N_(N), K_(K), L1_(L1), L2_(L2), T_(T) {
        if (M1 < 2 || M2 < 2) {
            throw InvalidDiscretization("M1 and M2 must be at least 2 (got " + std::to_string(M1) + ", " +
                                        std::to_string(M2) + ")");
        }
        if (N < 1) throw InvalidDiscretization("N must be at least 1");
        if (K < 1) throw InvalidDiscretization("K must be at least 1");
        if (!(L1 > 0.0) || !(L2 > 0.0) || !(T > 0.0)) {
            throw InvalidProblem("domain lengths and final time must be positive");
        }
    }

    std::size_t M1() const { return M1_; }
    std::size_t M2() const { return M2_; }
    std::size_t N() const { return N_; }
    std::size_t K() const { return K_; }
    double L1() const { return L1_; }
    double L2() const { return L2_; }
    double T() const { return T_; }

    double h1() const { return L1_ / static_cast<double>(M1_); }
    double h2() const { return L2_ / static_cast<double>(M2_); }
    double tau() const { return T_ / static_cast<double>(N_); }
    double dbeta() const { return 1.0 / static_cast<double>(K_); }

    double x(std::size_t i) const { return static_cast<double>(i) * h1(); }
    double y(std::size_t j) const { return static_cast<double>(j) * h2(); }
    double t(std::size_t n) const { return static_cast<double>(n) * tau(); }

    /// Number of interior unknowns, (M1-1)(M2-1).
    std::size_t interior_size() const { return (M1_ - 1) * (M2_ - 1); }

private:
    std::size_t M1_, M2_, N_, K_;
    double L1_, L2_, T_;
};

/// Grid function on the closed grid, (M1+1) x (M2+1) values stored row-major
/// with i (the x index) as the row: index(i, j) = i * (M2 + 1) + j.
class Field {
public:
    Field() = default;
    Field(std::size_t M1, std::size_t M2, double fill = 0.0)
        : M1_(M1), M2_(M2), values_((M1 + 1) * (M2 + 1), fill) {}

    std::size_t M1() const { return M1_; }
    std::size_t M2() const { return M2_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * (M2_ + 1) + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * (M2_ + 1) + j]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool same_shape(const Field& other) const { return M1_ == other.M1_ && M2_ == other.M2_; }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool operator==(const Field&) const = default;

private:
    std::size_t M1_ = 0;
    std::size_t M2_ = 0;
    std::vector<double> values_;
};

/// Samples g(x_i, y_j) on every node of the closed grid.
inline Field sample(const Discretization& disc, const SpatialFn& g) {
    Field f(disc.M1(), disc.M2());
    for (std::size_t i = 0; i <= disc.M1(); ++i) {
        for (std::size_t j = 0; j <= disc.M2(); ++j) f(i, j) = g(disc.x(i), disc.y(j));
    }
    return f;
}

inline Field sample(const Discretization& disc, const SpaceTimeFn& g, double t) {
    return sample(disc, [&](double x, double y) { return g(x, y, t); });
}

inline bool on_boundary(const Discretization& disc, std::size_t i, std::size_t j) {
    return i == 0 || j == 0 || i == disc.M1() || j == disc.M2();
}

namespace detail {

/// Gauss-Legendre nodes and weights on [a, b].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double a, double b) {
    std::vector<double> nodes(n), weights(n);
    for (std::size_t k = 0; k < (n + 1) / 2; ++k) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t m = 1; m <= n; ++m) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(m) - 1.0) * z * p1 - (static_cast<double>(m) - 1.0) * p2) /
                     static_cast<double>(m);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        nodes[k] = mid - half * z;
        nodes[n - 1 - k] = mid + half * z;
        weights[k] = weights[n - 1 - k] = half * w;
    }
    return {std::move(nodes), std::move(weights)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Built-in cases

/// Manufactured case with exact solution (t^3 + 2t + 4) sin x sin y on (0,pi)^2, T = 1/2,
/// weight Gamma(4 - b).
inline double analytic_example1(double x, double y, double t) {
    return (t * t * t + 2.0 * t + 4.0) * std::sin(x) * std::sin(y);
}

inline ProblemSpec example1() {
    ProblemSpec spec;
    spec.name = "example1";
    spec.weight = [](double beta) { return std::tgamma(4.0 - beta); };
    spec.L1 = std::numbers::pi;
    spec.L2 = std::numbers::pi;
    spec.T = 0.5;
    spec.psi1 = [](double x, double y) { return 4.0 * std::sin(x) * std::sin(y); };
    spec.psi2 = [](double x, double y) { return 2.0 * std::sin(x) * std::sin(y); };
    spec.phi = [](double, double, double) { return 0.0; };
    spec.source = [](double x, double y, double t, double u) {
        const double g = t * t * t + 2.0 * t + 4.0;
        // (6t^2 - 6t) / ln t has limit 0 as t -> 0+.
        const double memory = t > 0.0 ? (6.0 * t * t - 6.0 * t) / std::log(t) : 0.0;
        const double s = std::sin(x) * std::sin(y);
        return s * (2.0 * g + memory) - g * g * s * s + u * u;
    };
    // u^2 is only locally Lipschitz; 2 * max|u| over the solution range is the working bound.
    spec.lipschitz = 2.0 * 5.125;
    spec.exact = analytic_example1;
    return spec;
}

/// Constant solution u = c with zero source.
inline ProblemSpec constant_case(double c) {
    ProblemSpec spec;
    spec.name = "constant";
    spec.weight = [](double) { return 1.0; };
    spec.psi1 = [c](double, double) { return c; };
    spec.psi2 = [](double, double) { return 0.0; };
    spec.phi = [c](double, double, double) { return c; };
    spec.source = [](double, double, double, double) { return 0.0; };
    spec.lipschitz = 0.0;
    spec.exact = [c](double, double, double) { return c; };
    return spec;
}

inline ProblemSpec zero_case() {
    ProblemSpec spec = constant_case(0.0);
    spec.name = "zero";
    return spec;
}

/// Weight p(b) used by the separable family.
struct WeightChoice {
    enum class Kind { polynomial, gamma4 } kind = Kind::polynomial;
    std::vector<double> coeffs{1.0};  // polynomial in b, ascending powers

    double operator()(double beta) const {
        if (kind == Kind::gamma4) return std::tgamma(4.0 - beta);
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * beta + *it;
        return acc;
    }
};

/// Parameters of the separable manufactured family
///   u(x, y, t) = P(t) sin(kx x + px) sin(ky y + py),
/// with P a polynomial in t and the source built so that u is exact. The
/// source carries `nonlinear * (u^2 - u_exact^2)`, which vanishes on the exact solution.
struct SeparableParams {
    std::vector<double> time_poly{1.0};  // ascending powers of t
    double kx = 1.0, ky = 1.0;
    double px = 0.0, py = 0.0;
    double L1 = std::numbers::pi, L2 = std::numbers::pi, T = 0.5;
    double nonlinear = 0.0;
    WeightChoice weight;
};

namespace detail {

/// Distributed-order Caputo derivative of a polynomial in t at time t:
///   sum_m c_m m! int_1^2 p(b) t^(m-b) / Gamma(m+1-b) db, m >= 2
/// (constants and linear terms are annihilated for b > 1).
class DistributedPolyDerivative {
public:
    DistributedPolyDerivative(std::vector<double> poly, WeightChoice weight)
        : poly_(std::move(poly)), weight_(std::move(weight)) {
        std::tie(nodes_, weights_) = gauss_legendre(48, 1.0, 2.0);
    }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        const double lt = std::log(t);
        double acc = 0.0;
        for (std::size_t m = 2; m < poly_.size(); ++m) {
            if (poly_[m] == 0.0) continue;
            const double dm = static_cast<double>(m);
            double integral = 0.0;
            for (std::size_t q = 0; q < nodes_.size(); ++q) {
                const double b = nodes_[q];
                integral += weights_[q] * weight_(b) * std::exp((dm - b) * lt) / std::tgamma(dm + 1.0 - b);
            }
            acc += poly_[m] * std::tgamma(dm + 1.0) * integral;
        }
        return acc;
    }

private:
    std::vector<double> poly_;
    WeightChoice weight_;
    std::vector<double> nodes_, weights_;
};

inline double eval_poly(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

}  // namespace detail

inline ProblemSpec separable_case(const SeparableParams& prm) {
    struct Data {
        SeparableParams prm;
        detail::DistributedPolyDerivative dcap;
        // One-entry per-thread cache: the source is evaluated at a single t per time step.
        double caputo(double t) const {
            thread_local const Data* owner = nullptr;
            thread_local double last_t = 0.0;
            thread_local double last_d = 0.0;
            if (owner != this || t != last_t) {
                last_d = dcap(t);
                last_t = t;
                owner = this;
            }
            return last_d;
        }
        double shape(double x, double y) const {
            return std::sin(prm.kx * x + prm.px) * std::sin(prm.ky * y + prm.py);
        }
    };
    auto data = std::make_shared<Data>(Data{prm, detail::DistributedPolyDerivative(prm.time_poly, prm.weight)});

    std::vector<double> dpoly;
    for (std::size_t m = 1; m < prm.time_poly.size(); ++m) dpoly.push_back(static_cast<double>(m) * prm.time_poly[m]);
    if (dpoly.empty()) dpoly.push_back(0.0);

    ProblemSpec spec;
    spec.name = "separable";
    spec.weight = prm.weight;
    spec.L1 = prm.L1;
    spec.L2 = prm.L2;
    spec.T = prm.T;
    spec.exact = [data](double x, double y, double t) {
        return detail::eval_poly(data->prm.time_poly, t) * data->shape(x, y);
    };
    spec.psi1 = [data](double x, double y) { return detail::eval_poly(data->prm.time_poly, 0.0) * data->shape(x, y); };
    spec.psi2 = [data, p0 = dpoly.front()](double x, double y) { return p0 * data->shape(x, y); };
    spec.phi = spec.exact;
    spec.source = [data](double x, double y, double t, double u) {
        const double s = data->shape(x, y);
        const double P = detail::eval_poly(data->prm.time_poly, t);
        const double k2 = data->prm.kx * data->prm.kx + data->prm.ky * data->prm.ky;
        const double ue = P * s;
        return s * (data->caputo(t) + k2 * P) + data->prm.nonlinear * (u * u - ue * ue);
    };
    double pmax = 0.0;
    for (int q = 0; q <= 64; ++q) pmax = std::max(pmax, std::abs(detail::eval_poly(prm.time_poly, prm.T * q / 64.0)));
    spec.lipschitz = 2.0 * std::abs(prm.nonlinear) * pmax;
    return spec;
}

/// Checks the model invariants that can be checked on a grid: positive weight at
/// the given order nodes and phi(.,.,0) = psi1 on boundary nodes (within 1e-12).
inline void validate(const ProblemSpec& spec, const Discretization& disc, std::span<const double> betas) {
    if (!spec.weight || !spec.psi1 || !spec.psi2 || !spec.phi || !spec.source) {
        throw InvalidProblem("problem '" + spec.name + "' has an unset data function");
    }
    if (!(spec.L1 > 0.0) || !(spec.L2 > 0.0) || !(spec.T > 0.0)) {
        throw InvalidProblem("domain lengths and final time must be positive");
    }
    for (double b : betas) {
        const double p = spec.weight(b);
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw InvalidProblem("weight is not positive at beta = " + std::to_string(b));
        }
    }
    for (std::size_t i = 0; i <= disc.M1(); ++i) {
        for (std::size_t j = 0; j <= disc.M2(); ++j) {
            if (!on_boundary(disc, i, j)) continue;
            const double x = disc.x(i), y = disc.y(j);
            if (std::abs(spec.phi(x, y, 0.0) - spec.psi1(x, y)) > 1e-12) {
                throw InvalidProblem("boundary data and initial value disagree at t = 0 near (" +
                                     std::to_string(x) + ", " + std::to_string(y) + ")");
            }
        }
    }
}

}  // namespace dowave
