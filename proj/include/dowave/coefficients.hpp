#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dowave/errors.hpp"
#include "dowave/model.hpp"

namespace dowave {

/// Midpoints beta_l = 1 + (2l - 1) dbeta / 2, l = 1..K, of the uniform panels of [1, 2].
inline std::vector<double> quad_nodes(std::size_t K) {
    if (K == 0) throw InvalidDiscretization("K must be at least 1");
    const double db = 1.0 / static_cast<double>(K);
    std::vector<double> betas(K);
    for (std::size_t l = 1; l <= K; ++l) betas[l - 1] = 1.0 + (2.0 * static_cast<double>(l) - 1.0) * db / 2.0;
    return betas;
}

/// L1-type Caputo weight a_k = (k+1)^(2-beta) - k^(2-beta).
///
/// Evaluated as k^e * expm1(e * log1p(1/k)) for k >= 1 so that large k does not
/// cancel; a_0 = 1 exactly.
inline double caputo_a(std::size_t k, double beta) {
    if (k == 0) return 1.0;
    const double e = 2.0 - beta;
    const double dk = static_cast<double>(k);
    return std::exp(e * std::log(dk)) * std::expm1(e * std::log1p(1.0 / dk));
}

/// Midpoint approximation dbeta * sum_l p(beta_l) of the order integral of p over [1, 2].
template <typename Weight>
double order_integral(const Weight& p, std::size_t K) {
    const auto betas = quad_nodes(K);
    double acc = 0.0;
    for (double b : betas) acc += p(b);
    return acc / static_cast<double>(K);
}

/// Per-run scheme coefficients.
///
/// With c_l = dbeta * p(beta_l) * tau^(-beta_l) / Gamma(3 - beta_l):
///   mu  = sum_l c_l
///   W_j = sum_l c_l (a_{j-1} - a_j),     j = 1..N-1   (history weight at lag j)
///   s_n = tau * sum_l c_l a_{n-1},       n = 1..N     (psi2 weight)
class CoefficientTable {
public:
    CoefficientTable(const WeightFn& weight, const Discretization& disc)
        : N_(disc.N()), tau_(disc.tau()), betas_(quad_nodes(disc.K())) {
        const std::size_t K = betas_.size();
        const double db = disc.dbeta();
        const double log_tau = std::log(tau_);

        pvals_.resize(K);
        level_scale_.resize(K);
        a_.assign(K * N_, 0.0);
        for (std::size_t l = 0; l < K; ++l) {
            const double b = betas_[l];
            const double p = weight(b);
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw InvalidProblem("weight is not positive at beta = " + std::to_string(b));
            }
            pvals_[l] = p;
            level_scale_[l] = db * p * std::exp(-b * log_tau) / std::tgamma(3.0 - b);
            for (std::size_t k = 0; k < N_; ++k) a_[l * N_ + k] = caputo_a(k, b);
        }

        mu_ = 0.0;
        for (double c : level_scale_) mu_ += c;

        W_.assign(N_ > 0 ? N_ - 1 : 0, 0.0);
        for (std::size_t j = 1; j < N_; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < K; ++l) acc += level_scale_[l] * (a(l, j - 1) - a(l, j));
            W_[j - 1] = acc;
        }

        s_.assign(N_, 0.0);
        for (std::size_t n = 1; n <= N_; ++n) {
            double acc = 0.0;
            for (std::size_t l = 0; l < K; ++l) acc += level_scale_[l] * a(l, n - 1);
            s_[n - 1] = tau_ * acc;
        }
    }

    CoefficientTable(const ProblemSpec& spec, const Discretization& disc) : CoefficientTable(spec.weight, disc) {}

    std::size_t K() const { return betas_.size(); }
    std::size_t N() const { return N_; }
    double tau() const { return tau_; }

    std::span<const double> betas() const { return betas_; }
    std::span<const double> pvals() const { return pvals_; }

    /// dbeta * p(beta_l) * tau^(-beta_l) / Gamma(3 - beta_l), 0-based level l.
    double level_scale(std::size_t l) const { return level_scale_[l]; }

    /// a_k^(beta_l) for 0-based level l and k in [0, N).
    double a(std::size_t l, std::size_t k) const { return a_[l * N_ + k]; }

    double mu() const { return mu_; }

    /// History weight at lag j, 1 <= j <= N-1.
    double W(std::size_t j) const { return W_[j - 1]; }
    std::span<const double> W() const { return W_; }

    /// psi2 weight at step n, 1 <= n <= N.
    double s(std::size_t n) const { return s_[n - 1]; }
    std::span<const double> s() const { return s_; }

    /// Discrete c0, dbeta * sum_l p(beta_l).
    double order_integral() const {
        double acc = 0.0;
        for (double p : pvals_) acc += p;
        return acc / static_cast<double>(pvals_.size());
    }

private:
    std::size_t N_;
    double tau_;
    std::vector<double> betas_;
    std::vector<double> pvals_;
    std::vector<double> level_scale_;
    std::vector<double> a_;  // K x N, row per level
    double mu_ = 0.0;
    std::vector<double> W_;
    std::vector<double> s_;
};

inline CoefficientTable build_table(const ProblemSpec& spec, const Discretization& disc) {
    return CoefficientTable(spec, disc);
}

}  // namespace dowave
