#ifndef CGGIBBS_THEORY_CHECKS_HPP
#define CGGIBBS_THEORY_CHECKS_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cggibbs/condition.hpp"
#include "cggibbs/dugs.hpp"
#include "cggibbs/gaussian_target.hpp"
#include "cggibbs/rng.hpp"

namespace cggibbs {

/// Haar-ish random orthogonal matrix via QR of a Gaussian matrix, with the
/// sign convention fixed so R has a positive diagonal.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, RngStream& rng) {
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::VectorXd r_diag = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < d; ++j)
        if (r_diag[j] < 0.0) q.col(j) = -q.col(j);
    return q;
}

/// Random SPD matrix with eigenvalues log-uniform in [1/kappa_max, 1].
inline Eigen::MatrixXd random_spd(Eigen::Index d, RngStream& rng,
                                  double kappa_max = 1e3) {
    if (d < 1) throw std::invalid_argument("random_spd: dimension must be >= 1");
    if (!(kappa_max >= 1.0))
        throw std::invalid_argument("random_spd: kappa_max must be >= 1");
    const Eigen::MatrixXd q = random_orthogonal(d, rng);
    Eigen::VectorXd lambda(d);
    for (Eigen::Index i = 0; i < d; ++i)
        lambda[i] = std::exp(rng.uniform(-std::log(kappa_max), 0.0));
    Eigen::MatrixXd sigma = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

/// Random symmetric M-matrix precision Q = s I - W with W entrywise
/// non-negative and s > rho(W), so all off-diagonal entries of Q are
/// non-positive and Q is positive definite.
inline Eigen::MatrixXd random_m_matrix_precision(Eigen::Index d, RngStream& rng,
                                                 double min_margin = 0.05,
                                                 double max_margin = 1.0) {
    if (d < 1)
        throw std::invalid_argument("random_m_matrix_precision: dimension must be >= 1");
    if (!(min_margin > 0.0) || !(max_margin >= min_margin))
        throw std::invalid_argument("random_m_matrix_precision: bad margin range");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = j + 1; i < d; ++i) {
            const double v = rng.uniform();
            w(i, j) = v;
            w(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w, Eigen::EigenvaluesOnly);
    const double rho_w = std::max(std::abs(es.eigenvalues().minCoeff()),
                                  std::abs(es.eigenvalues().maxCoeff()));
    const double margin = rng.uniform(min_margin, max_margin);
    const double s = (d == 1 ? 1.0 : rho_w * (1.0 + margin));
    return s * Eigen::MatrixXd::Identity(d, d) - w;
}

/// True when the precision of Sigma has non-positive off-diagonal entries
/// (up to eigen-inversion round-off) -- the hypothesis under which the
/// sweep-rate bound below is guaranteed.
inline bool has_m_matrix_precision(const Eigen::MatrixXd& sigma) {
    GaussianTarget target(Eigen::VectorXd::Zero(sigma.rows()), sigma);
    const Eigen::MatrixXd& q = target.precision();
    const double tol = 1e-10 * std::max(1.0, q.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        for (Eigen::Index i = 0; i < q.rows(); ++i)
            if (i != j && q(i, j) > tol) return false;
    return true;
}

/// Rate/conditioning comparison for one Gaussian target: the sweep-map
/// spectral radius against exp(-1/kappa). The inequality
///   rho(B) <= exp(-1/kappa(Sigma))
/// holds when the precision has non-positive off-diagonal entries, so inputs
/// outside that class are rejected rather than silently checked.
struct RateBoundCheck {
    double rho;
    double kappa;
    double bound;
    bool holds;
};

inline RateBoundCheck rate_bound_check(const Eigen::MatrixXd& sigma,
                                       double tol = 1e-12) {
    if (!has_m_matrix_precision(sigma))
        throw std::invalid_argument(
            "rate_bound_check: precision has a positive off-diagonal entry");
    RateBoundCheck out;
    out.rho = spectral_radius(build_dugs_matrices(sigma).b);
    out.kappa = kappa(sigma);
    out.bound = std::exp(-1.0 / out.kappa);
    out.holds = out.rho <= out.bound + tol;
    return out;
}

/// Diagonal-rescaling invariance of the sweep map: for D = diag(scale),
/// B(D Sigma D) equals D B(Sigma) D^{-1}, so the two spectral radii agree.
/// Returns both radii plus the largest entrywise similarity defect.
struct ScalingInvarianceCheck {
    double rho_original;
    double rho_scaled;
    double matrix_defect;
};

inline ScalingInvarianceCheck scaling_invariance_check(const Eigen::MatrixXd& sigma,
                                                       const Eigen::VectorXd& scale) {
    if (scale.size() != sigma.rows())
        throw std::invalid_argument("scaling_invariance_check: scale size mismatch");
    if (scale.minCoeff() <= 0.0)
        throw std::invalid_argument("scaling_invariance_check: scale must be positive");
    const Eigen::MatrixXd b = build_dugs_matrices(sigma).b;
    const Eigen::MatrixXd sigma_scaled =
        scale.asDiagonal() * sigma * scale.asDiagonal();
    const Eigen::MatrixXd b_scaled =
        build_dugs_matrices(0.5 * (sigma_scaled + sigma_scaled.transpose())).b;
    const Eigen::MatrixXd similar =
        scale.asDiagonal() * b * scale.cwiseInverse().asDiagonal();
    ScalingInvarianceCheck out;
    out.rho_original = spectral_radius(b);
    out.rho_scaled = spectral_radius(b_scaled);
    out.matrix_defect = (b_scaled - similar).cwiseAbs().maxCoeff();
    return out;
}

} // namespace cggibbs

#endif
