#ifndef CGGIBBS_GAUSSIAN_TARGET_HPP
#define CGGIBBS_GAUSSIAN_TARGET_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "cggibbs/rng.hpp"

namespace cggibbs {

namespace detail {

inline void require_square(const Eigen::MatrixXd& m, const char* who) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
}

inline void require_symmetric(const Eigen::MatrixXd& m, const char* who) {
    require_square(m, who);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
}

/// Symmetric PSD square root with eigenvalues clamped from below at 1e-14
/// so that tiny negative rounding errors do not poison the result.
inline Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(1e-14);
    return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

} // namespace detail

/// Multivariate normal target with mean, covariance, and precision held
/// together. Construction fails unless the covariance is symmetric positive
/// definite.
class GaussianTarget {
  public:
    GaussianTarget(Eigen::VectorXd mu, Eigen::MatrixXd sigma)
        : mu_(std::move(mu)), sigma_(std::move(sigma)) {
        detail::require_symmetric(sigma_, "GaussianTarget");
        if (mu_.size() != sigma_.rows())
            throw std::invalid_argument("GaussianTarget: mean/covariance size mismatch");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument("GaussianTarget: covariance must be positive definite");
        q_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
        q_ = 0.5 * (q_ + q_.transpose()).eval(); // keep the precision exactly symmetric
    }

    Eigen::Index dim() const { return mu_.size(); }
    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& sigma() const { return sigma_; }
    const Eigen::MatrixXd& precision() const { return q_; }

  private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd q_;
};

/// Exact Gibbs update of coordinate j: draws from the full conditional
///   theta_j | theta_{-j} ~ N(mu_j - Q_jj^{-1} sum_{k != j} Q_jk (theta_k - mu_k), Q_jj^{-1}).
inline double exact_gaussian_gibbs_update(const GaussianTarget& target,
                                          const Eigen::VectorXd& theta,
                                          Eigen::Index j, RngStream& rng) {
    if (theta.size() != target.dim())
        throw std::invalid_argument("exact_gaussian_gibbs_update: state size mismatch");
    if (j < 0 || j >= target.dim())
        throw std::out_of_range("exact_gaussian_gibbs_update: coordinate out of range");
    const Eigen::MatrixXd& q = target.precision();
    const Eigen::VectorXd& mu = target.mu();
    double cross = 0.0;
    for (Eigen::Index k = 0; k < target.dim(); ++k)
        if (k != j) cross += q(j, k) * (theta[k] - mu[k]);
    const double cond_mean = mu[j] - cross / q(j, j);
    const double cond_sd = std::sqrt(1.0 / q(j, j));
    return cond_mean + cond_sd * rng.normal();
}

/// KL(p || q) between two Gaussians, in nats.
inline double gaussian_kl(const Eigen::VectorXd& mu_p, const Eigen::MatrixXd& sigma_p,
                          const Eigen::VectorXd& mu_q, const Eigen::MatrixXd& sigma_q) {
    detail::require_symmetric(sigma_p, "gaussian_kl");
    detail::require_symmetric(sigma_q, "gaussian_kl");
    const Eigen::Index d = mu_p.size();
    if (mu_q.size() != d || sigma_p.rows() != d || sigma_q.rows() != d)
        throw std::invalid_argument("gaussian_kl: dimension mismatch");

    Eigen::LLT<Eigen::MatrixXd> llt_q(sigma_q);
    if (llt_q.info() != Eigen::Success)
        throw std::invalid_argument("gaussian_kl: second covariance not positive definite");
    Eigen::LLT<Eigen::MatrixXd> llt_p(sigma_p);
    if (llt_p.info() != Eigen::Success)
        throw std::invalid_argument("gaussian_kl: first covariance not positive definite");

    const double trace_term = llt_q.solve(sigma_p).trace();
    const Eigen::VectorXd diff = mu_q - mu_p;
    const double maha = diff.dot(llt_q.solve(diff));
    const double logdet_q =
        2.0 * llt_q.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double logdet_p =
        2.0 * llt_p.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return 0.5 * (trace_term - static_cast<double>(d) + maha + logdet_q - logdet_p);
}

/// 2-Wasserstein distance between two Gaussians (Euclidean ground metric).
inline double gaussian_w2(const Eigen::VectorXd& mu_p, const Eigen::MatrixXd& sigma_p,
                          const Eigen::VectorXd& mu_q, const Eigen::MatrixXd& sigma_q) {
    detail::require_symmetric(sigma_p, "gaussian_w2");
    detail::require_symmetric(sigma_q, "gaussian_w2");
    const Eigen::Index d = mu_p.size();
    if (mu_q.size() != d || sigma_p.rows() != d || sigma_q.rows() != d)
        throw std::invalid_argument("gaussian_w2: dimension mismatch");

    const Eigen::MatrixXd root_q = detail::spd_sqrt(sigma_q);
    Eigen::MatrixXd cross = root_q * sigma_p * root_q;
    cross = 0.5 * (cross + cross.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cross);
    const double trace_cross_root =
        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double w2_sq = (mu_p - mu_q).squaredNorm() + sigma_p.trace() +
                         sigma_q.trace() - 2.0 * trace_cross_root;
    return std::sqrt(std::max(0.0, w2_sq));
}

inline double gaussian_kl(const GaussianTarget& p, const GaussianTarget& q) {
    return gaussian_kl(p.mu(), p.sigma(), q.mu(), q.sigma());
}

inline double gaussian_w2(const GaussianTarget& p, const GaussianTarget& q) {
    return gaussian_w2(p.mu(), p.sigma(), q.mu(), q.sigma());
}

} // namespace cggibbs

#endif
