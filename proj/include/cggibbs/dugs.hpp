#ifndef CGGIBBS_DUGS_HPP
#define CGGIBBS_DUGS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cggibbs/gaussian_target.hpp"

namespace cggibbs {

/// Spectral radius of a general (possibly non-symmetric) real matrix. Uses a
/// dense eigensolve up to 512x512 and a scaled repeated-squaring estimate of
/// lim ||M^k||^{1/k} beyond that.
inline double spectral_radius(const Eigen::MatrixXd& m) {
    detail::require_square(m, "spectral_radius");
    if (m.rows() <= 512) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::MatrixXd a = m;
    double log_scale = 0.0; // a == M^{2^k} / exp(log_scale) after k squarings
    double previous = std::numeric_limits<double>::quiet_NaN();
    int k = 0;
    for (; k < 48; ++k) {
        const double norm = a.norm();
        if (norm == 0.0) return 0.0;
        log_scale = 2.0 * (log_scale + std::log(norm));
        a = (a / norm) * (a / norm);
        const double estimate =
            std::exp((log_scale + std::log(a.norm())) / std::pow(2.0, k + 1));
        if (k >= 8 && std::abs(estimate - previous) <= 1e-10 * (1.0 + estimate))
            return estimate;
        previous = estimate;
    }
    throw std::runtime_error(
        "spectral_radius: norm-growth estimate did not converge after 48 squarings");
}

/// One-sweep transition structure of the deterministic-scan Gibbs sampler on
/// a Gaussian target with precision Q:
///   A = I - diag(Q)^{-1} Q   (single-coordinate update map, zero diagonal),
///   A = L + U with L the strictly lower triangular part,
///   B = (I - L)^{-1} U       (full sweep map).
struct DugsMatrices {
    Eigen::MatrixXd a;
    Eigen::MatrixXd l;
    Eigen::MatrixXd u;
    Eigen::MatrixXd b;
};

inline DugsMatrices build_dugs_matrices(const Eigen::MatrixXd& sigma) {
    GaussianTarget target(Eigen::VectorXd::Zero(sigma.rows()), sigma);
    const Eigen::MatrixXd& q = target.precision();
    const Eigen::Index d = q.rows();
    Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(d, d) - q.diagonal().cwiseInverse().asDiagonal() * q;
    a.diagonal().setZero(); // exact zeros; rounding could leave |eps| residue
    Eigen::MatrixXd lower = a.triangularView<Eigen::StrictlyLower>();
    Eigen::MatrixXd upper = a - lower;
    Eigen::MatrixXd b = (Eigen::MatrixXd::Identity(d, d) - lower)
                            .triangularView<Eigen::Lower>()
                            .solve(upper);
    return DugsMatrices{std::move(a), std::move(lower), std::move(upper), std::move(b)};
}

inline DugsMatrices build_dugs_matrices(const GaussianTarget& target) {
    return build_dugs_matrices(target.sigma());
}

/// M^t for integer t >= 0 by binary exponentiation.
inline Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, std::uint64_t t) {
    detail::require_square(m, "matrix_power");
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(m.rows(), m.cols());
    Eigen::MatrixXd base = m;
    while (t > 0) {
        if (t & 1u) result = (result * base).eval();
        base = (base * base).eval();
        t >>= 1;
    }
    return result;
}

/// Exact marginal law of the deterministic-scan chain after t full sweeps,
/// started from N(mu0, sigma0):
///   mu_t    = mu + B^t (mu0 - mu)
///   sigma_t = sigma + B^t (sigma0 - sigma) (B^t)'.
struct GaussianMoments {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
};

inline GaussianMoments dugs_moments(const GaussianTarget& target,
                                    const Eigen::VectorXd& mu0,
                                    const Eigen::MatrixXd& sigma0,
                                    std::uint64_t t) {
    if (mu0.size() != target.dim() || sigma0.rows() != target.dim() ||
        sigma0.cols() != target.dim())
        throw std::invalid_argument("dugs_moments: start moment size mismatch");
    const Eigen::MatrixXd bt = matrix_power(build_dugs_matrices(target).b, t);
    GaussianMoments out;
    out.mu = target.mu() + bt * (mu0 - target.mu());
    out.sigma = target.sigma() + bt * (sigma0 - target.sigma()) * bt.transpose();
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    return out;
}

enum class DivergenceKind { W2, Kl, TvUpperBound };

inline double gaussian_divergence(DivergenceKind kind, const Eigen::VectorXd& mu_p,
                                  const Eigen::MatrixXd& sigma_p,
                                  const GaussianTarget& target) {
    switch (kind) {
    case DivergenceKind::W2:
        return gaussian_w2(mu_p, sigma_p, target.mu(), target.sigma());
    case DivergenceKind::Kl:
        return gaussian_kl(mu_p, sigma_p, target.mu(), target.sigma());
    case DivergenceKind::TvUpperBound:
        // Pinsker: TV <= sqrt(KL/2).
        return std::sqrt(
            0.5 * gaussian_kl(mu_p, sigma_p, target.mu(), target.sigma()));
    }
    throw std::logic_error("gaussian_divergence: unknown kind");
}

/// Divergence of the t-sweep marginal from the target for t = 0..t_max.
/// sigma0 may be singular (a point start uses sigma0 = 0), so the decaying
/// marginal is regularised with a vanishing ridge only where the metric
/// requires a density (KL / TV bound).
inline std::vector<double> divergence_decay_curve(const GaussianTarget& target,
                                                  const Eigen::VectorXd& mu0,
                                                  const Eigen::MatrixXd& sigma0,
                                                  DivergenceKind kind,
                                                  std::uint64_t t_max) {
    const Eigen::MatrixXd b = build_dugs_matrices(target).b;
    Eigen::MatrixXd bt = Eigen::MatrixXd::Identity(target.dim(), target.dim());
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(t_max) + 1);
    const Eigen::MatrixXd ridge =
        1e-13 * target.sigma().trace() / static_cast<double>(target.dim()) *
        Eigen::MatrixXd::Identity(target.dim(), target.dim());
    for (std::uint64_t t = 0; t <= t_max; ++t) {
        Eigen::VectorXd mu_t = target.mu() + bt * (mu0 - target.mu());
        Eigen::MatrixXd sigma_t =
            target.sigma() + bt * (sigma0 - target.sigma()) * bt.transpose();
        sigma_t = 0.5 * (sigma_t + sigma_t.transpose()).eval();
        if (kind != DivergenceKind::W2) sigma_t += ridge;
        curve.push_back(gaussian_divergence(kind, mu_t, sigma_t, target));
        bt = (bt * b).eval();
    }
    return curve;
}

/// Least-squares slope of log(curve[t]) against t, fitted on the entries
/// above `floor` after skipping the leading `skip` points (transient). For a
/// geometrically decaying curve this recovers the log of the decay rate.
inline double log_decay_slope(const std::vector<double>& curve,
                              std::size_t skip = 0, double floor = 1e-12) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t t = skip; t < curve.size(); ++t) {
        if (!(curve[t] > floor)) continue;
        const double x = static_cast<double>(t);
        const double y = std::log(curve[t]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2)
        throw std::invalid_argument("log_decay_slope: fewer than two usable points");
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("log_decay_slope: degenerate abscissae");
    return (static_cast<double>(count) * sxy - sx * sy) / denom;
}

} // namespace cggibbs

#endif
