#ifndef CGGIBBS_RATE_BOUNDS_HPP
#define CGGIBBS_RATE_BOUNDS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

#include "cggibbs/dugs.hpp"
#include "cggibbs/gaussian_target.hpp"

namespace cggibbs {

/// Lower bound on ESS/T implied by geometric convergence at rate rho in
/// total variation with constant C, for a test function f bounded by 1:
///   ESS/T >= 1 / (1 + (4 C / pi(f^2)) * rho / (1 - rho)).
/// Equals 1 at rho = 0 and scales like pi(f^2) (1 - rho) / (4 C) as rho -> 1.
inline double relative_ess_lower_bound_tv(double rho, double c, double pi_f_sq) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("relative_ess_lower_bound_tv: rho must lie in [0, 1)");
    if (!(c >= 0.0))
        throw std::invalid_argument("relative_ess_lower_bound_tv: C must be non-negative");
    if (!(pi_f_sq > 0.0))
        throw std::invalid_argument("relative_ess_lower_bound_tv: pi(f^2) must be positive");
    return 1.0 / (1.0 + (4.0 * c / pi_f_sq) * rho / (1.0 - rho));
}

/// Lower bound on ESS/T implied by an L2 (chi-square) geometric rate rho,
/// valid for any square-integrable f:
///   ESS/T >= 1 / (1 + 2 sqrt(rho) / (1 - sqrt(rho))).
/// Equals 1 at rho = 0 and scales like (1 - sqrt(rho)) / 2 as rho -> 1.
inline double relative_ess_lower_bound_chi_sq(double rho) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument(
            "relative_ess_lower_bound_chi_sq: rho must lie in [0, 1)");
    const double r = std::sqrt(rho);
    return 1.0 / (1.0 + 2.0 * r / (1.0 - r));
}

/// Smallest sweep count t with divergence(pi_t, pi) <= eps for the
/// deterministic-scan chain started at N(mu0, sigma0). Brackets by doubling
/// and then scans linearly inside the bracket; throws if the divergence has
/// not dropped below eps by t_cap sweeps.
inline std::uint64_t gaussian_mixing_time(const GaussianTarget& target,
                                          const Eigen::VectorXd& mu0,
                                          const Eigen::MatrixXd& sigma0,
                                          DivergenceKind kind, double eps,
                                          std::uint64_t t_cap = 1u << 24) {
    if (!(eps > 0.0))
        throw std::invalid_argument("gaussian_mixing_time: eps must be positive");
    if (t_cap < 1)
        throw std::invalid_argument("gaussian_mixing_time: t_cap must be >= 1");

    const auto divergence_at = [&](std::uint64_t t) {
        const GaussianMoments m = dugs_moments(target, mu0, sigma0, t);
        Eigen::MatrixXd sigma_t = m.sigma;
        if (kind != DivergenceKind::W2) {
            sigma_t += 1e-13 * target.sigma().trace() /
                       static_cast<double>(target.dim()) *
                       Eigen::MatrixXd::Identity(target.dim(), target.dim());
        }
        return gaussian_divergence(kind, m.mu, sigma_t, target);
    };

    if (divergence_at(0) <= eps) return 0;
    std::uint64_t hi = 1;
    while (divergence_at(hi) > eps) {
        if (hi >= t_cap)
            throw std::runtime_error(
                "gaussian_mixing_time: divergence still above eps at the sweep cap");
        hi = std::min(2 * hi, t_cap);
    }
    // First crossing lies in (hi/2, hi]; walk it down linearly.
    for (std::uint64_t t = hi / 2 + 1; t <= hi; ++t)
        if (divergence_at(t) <= eps) return t;
    return hi;
}

} // namespace cggibbs

#endif
