#ifndef CGGIBBS_CONDITION_HPP
#define CGGIBBS_CONDITION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "cggibbs/gaussian_target.hpp"
#include "cggibbs/rng.hpp"

namespace cggibbs {

/// Spectral condition number lambda_max / lambda_min of an SPD matrix.
inline double kappa(const Eigen::MatrixXd& sigma) {
    detail::require_symmetric(sigma, "kappa");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0)
        throw std::invalid_argument("kappa: matrix must be positive definite");
    return hi / lo;
}

/// Condition number of the correlation matrix D Sigma D with
/// D = diag(Sigma_ii^{-1/2}).
inline double kappa_cor(const Eigen::MatrixXd& sigma) {
    detail::require_symmetric(sigma, "kappa_cor");
    if (sigma.diagonal().minCoeff() <= 0.0)
        throw std::invalid_argument("kappa_cor: diagonal must be positive");
    const Eigen::VectorXd d_inv = sigma.diagonal().cwiseSqrt().cwiseInverse();
    return kappa(d_inv.asDiagonal() * sigma * d_inv.asDiagonal());
}

namespace detail {

/// Standard Nelder-Mead on R^m, minimising f. Never returns a value worse
/// than f at the start point (the start is a vertex of the initial simplex
/// and the incumbent best is monotone).
inline double nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          Eigen::VectorXd start, double initial_step,
                          int max_iters, Eigen::VectorXd* argmin = nullptr) {
    const Eigen::Index m = start.size();
    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> value;
    simplex.reserve(static_cast<std::size_t>(m) + 1);
    simplex.push_back(start);
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::VectorXd v = start;
        v[i] += initial_step;
        simplex.push_back(std::move(v));
    }
    value.reserve(simplex.size());
    for (const auto& v : simplex) value.push_back(f(v));

    const auto order = [&] {
        std::vector<std::size_t> idx(simplex.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            s2.push_back(simplex[i]);
            v2.push_back(value[i]);
        }
        simplex.swap(s2);
        value.swap(v2);
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        order();
        if (value.back() - value.front() < 1e-11 * (1.0 + std::abs(value.front())))
            break;
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(m);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i];
        centroid /= static_cast<double>(simplex.size() - 1);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex.back());
        const double f_reflected = f(reflected);
        if (f_reflected < value.front()) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex.back());
            const double f_expanded = f(expanded);
            if (f_expanded < f_reflected) {
                simplex.back() = expanded;
                value.back() = f_expanded;
            } else {
                simplex.back() = reflected;
                value.back() = f_reflected;
            }
            continue;
        }
        if (f_reflected < value[value.size() - 2]) {
            simplex.back() = reflected;
            value.back() = f_reflected;
            continue;
        }
        const Eigen::VectorXd contracted =
            centroid + 0.5 * (simplex.back() - centroid);
        const double f_contracted = f(contracted);
        if (f_contracted < value.back()) {
            simplex.back() = contracted;
            value.back() = f_contracted;
            continue;
        }
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            simplex[i] = simplex.front() + 0.5 * (simplex[i] - simplex.front());
            value[i] = f(simplex[i]);
        }
    }
    order();
    if (argmin) *argmin = simplex.front();
    return value.front();
}

} // namespace detail

/// Best diagonal rescaling found for kappa_r, with the log scaling vector
/// that achieves it.
struct KappaRResult {
    double value;
    Eigen::VectorXd log_scale;
};

/// Certified upper bound on the diagonally rescaled condition number
///   kappa_r(Sigma) = inf over positive diagonal D of kappa(D Sigma D),
/// computed by multi-start Nelder-Mead (budget iterations per start) over
/// the log scaling vector. The five starts are the identity scaling, the
/// +/- log marginal-sd scalings, and two seeded random vectors; because the
/// identity and correlation scalings are start vertices, the result never
/// exceeds min(kappa, kappa_cor) by more than solver noise. The exact
/// infimum is not computable in general; this is an upper bound.
inline KappaRResult kappa_r_search(const Eigen::MatrixXd& sigma, int budget = 2000,
                                   std::uint64_t seed = 12345) {
    detail::require_symmetric(sigma, "kappa_r");
    const Eigen::Index d = sigma.rows();
    if (budget < 1) throw std::invalid_argument("kappa_r: budget must be >= 1");
    if (sigma.diagonal().minCoeff() <= 0.0)
        throw std::invalid_argument("kappa_r: diagonal must be positive");
    if (d == 1) {
        if (sigma(0, 0) <= 0.0)
            throw std::invalid_argument("kappa_r: matrix must be positive definite");
        return KappaRResult{1.0, Eigen::VectorXd::Zero(1)};
    }

    const auto objective = [&](const Eigen::VectorXd& s) {
        const Eigen::VectorXd scale = s.array().exp();
        Eigen::MatrixXd scaled = scale.asDiagonal() * sigma * scale.asDiagonal();
        scaled = 0.5 * (scaled + scaled.transpose()).eval();
        return std::log(kappa(scaled));
    };

    const Eigen::VectorXd log_sd = sigma.diagonal().array().sqrt().log();
    std::vector<Eigen::VectorXd> starts;
    starts.push_back(Eigen::VectorXd::Zero(d)); // kappa itself
    starts.push_back(-log_sd);                  // correlation scaling
    starts.push_back(log_sd);
    RngStream rng(seed);
    for (int r = 0; r < 2; ++r) {
        Eigen::VectorXd s(d);
        for (Eigen::Index i = 0; i < d; ++i) s[i] = rng.normal(0.0, 0.5);
        starts.push_back(std::move(s));
    }

    KappaRResult best{std::numeric_limits<double>::infinity(),
                      Eigen::VectorXd::Zero(d)};
    for (const auto& start : starts) {
        Eigen::VectorXd argmin;
        const double value =
            detail::nelder_mead(objective, start, 0.25, budget, &argmin);
        if (value < best.value) {
            best.value = value;
            best.log_scale = argmin;
        }
    }
    best.value = std::exp(best.value);
    return best;
}

inline double kappa_r(const Eigen::MatrixXd& sigma, int budget = 2000,
                      std::uint64_t seed = 12345) {
    return kappa_r_search(sigma, budget, seed).value;
}

} // namespace cggibbs

#endif
