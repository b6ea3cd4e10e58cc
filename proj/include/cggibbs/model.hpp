#ifndef CGGIBBS_MODEL_HPP
#define CGGIBBS_MODEL_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "cggibbs/cache.hpp"
#include "cggibbs/dataset.hpp"
#include "cggibbs/opcount.hpp"

namespace cggibbs {

/// log(1 + e^eta), switching to the asymptotic branch for |eta| > 35.
/// Finite for |eta| <= 700.
inline double log1p_exp(double eta) {
    if (eta > 35.0) return eta;
    if (eta < -35.0) return std::exp(eta);
    return std::log1p(std::exp(eta));
}

/// Bernoulli-logit log density of one observation at linear predictor eta.
inline double bernoulli_logit_term(double y, double eta) {
    return y * eta - log1p_exp(eta);
}

inline double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

enum class Likelihood { LogisticBernoulli };

/// Prior on the regression block.
///
/// Horseshoe: t(3,0,1) on the intercept (coordinate 0), N(0, (lambda_j tau)^2)
/// slabs on coordinates 1..d-1 with half-Cauchy(0,1) local scales lambda_j
/// and global scale tau. The scales are sampled on the log scale, so the
/// half-Cauchy densities below carry the e^u change-of-variables factor.
struct PriorSpec {
    enum class Kind { IsotropicGaussian, Horseshoe };
    Kind kind = Kind::IsotropicGaussian;
    double sd = 10.0;

    static PriorSpec gaussian(double sd) {
        if (!(sd > 0.0)) throw std::invalid_argument("PriorSpec: sd must be positive");
        return PriorSpec{Kind::IsotropicGaussian, sd};
    }
    static PriorSpec horseshoe() { return PriorSpec{Kind::Horseshoe, 0.0}; }
};

struct GlmModel {
    Likelihood likelihood = Likelihood::LogisticBernoulli;
    PriorSpec prior;
};

/// Index map over the full parameter vector.
///
/// Gaussian prior:  D = d, all coordinates are regression coefficients.
/// Horseshoe prior: D = 2d, laid out as
///   [ theta_0 .. theta_{d-1} | log lambda_1 .. log lambda_{d-1} | log tau ].
struct ParameterLayout {
    Eigen::Index d = 0;
    bool horseshoe = false;

    Eigen::Index size() const { return horseshoe ? 2 * d : d; }
    bool is_regression(Eigen::Index k) const { return k < d; }
    bool is_log_tau(Eigen::Index k) const { return horseshoe && k == 2 * d - 1; }
    bool is_log_lambda(Eigen::Index k) const {
        return horseshoe && k >= d && k < 2 * d - 1;
    }
    /// Regression coordinate scaled by the local scale stored at latent k.
    Eigen::Index scaled_coordinate(Eigen::Index k) const { return k - d + 1; }
    Eigen::Index log_lambda_index(Eigen::Index j) const { return d + j - 1; }
    Eigen::Index log_tau_index() const { return 2 * d - 1; }
};

inline ParameterLayout layout_for(const GlmModel& model, Eigen::Index d) {
    return ParameterLayout{d, model.prior.kind == PriorSpec::Kind::Horseshoe};
}

/// All-zero start: theta = 0 and, for the horseshoe, lambda_j = tau = 1.
inline Eigen::VectorXd initial_parameters(const ParameterLayout& layout) {
    return Eigen::VectorXd::Zero(layout.size());
}

inline double log_likelihood_at(const GlmModel& model, const Dataset& dataset,
                                const Eigen::VectorXd& predictors) {
    if (predictors.size() != dataset.n())
        throw std::invalid_argument("log_likelihood_at: predictor length mismatch");
    if (!predictors.allFinite())
        throw std::invalid_argument("log_likelihood_at: non-finite predictor");
    (void)model; // single likelihood family
    double total = 0.0;
    const Eigen::VectorXd& y = dataset.y();
    for (Eigen::Index i = 0; i < dataset.n(); ++i)
        total += bernoulli_logit_term(y[i], predictors[i]);
    return total;
}

namespace detail {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// log density of t(3, 0, 1).
inline double log_t3_density(double x) {
    // gamma(2)/(gamma(3/2) sqrt(3 pi)) = 2/(sqrt(3) pi)
    static const double kConst = std::log(2.0 / (std::sqrt(3.0) * M_PI));
    return kConst - 2.0 * std::log1p(x * x / 3.0);
}

// log density of a half-Cauchy(0,1) variable expressed in u = log(scale),
// Jacobian included: p(u) = (2/pi) e^u / (1 + e^{2u}).
inline double log_half_cauchy_logscale(double u) {
    static const double kConst = std::log(2.0 / M_PI);
    return kConst + u - log1p_exp(2.0 * u);
}

inline double log_normal_density(double x, double log_sd) {
    const double z = x * std::exp(-log_sd);
    return -0.5 * kLog2Pi - log_sd - 0.5 * z * z;
}

} // namespace detail

/// Sum of the log prior terms that involve coordinate k, evaluated with
/// coordinate k replaced by `value`. Constant in the other coordinates'
/// contributions, so conditional targets can use it directly.
inline double prior_terms_for_coordinate(const GlmModel& model,
                                         const ParameterLayout& layout,
                                         const Eigen::VectorXd& theta,
                                         Eigen::Index k, double value) {
    if (model.prior.kind == PriorSpec::Kind::IsotropicGaussian) {
        return detail::log_normal_density(value, std::log(model.prior.sd));
    }
    const Eigen::Index d = layout.d;
    if (layout.is_regression(k)) {
        if (k == 0) return detail::log_t3_density(value);
        const double log_scale =
            theta[layout.log_lambda_index(k)] + theta[layout.log_tau_index()];
        return detail::log_normal_density(value, log_scale);
    }
    if (layout.is_log_lambda(k)) {
        const Eigen::Index j = layout.scaled_coordinate(k);
        const double log_scale = value + theta[layout.log_tau_index()];
        return detail::log_normal_density(theta[j], log_scale) +
               detail::log_half_cauchy_logscale(value);
    }
    // log tau: every slab plus its own half-Cauchy term.
    double total = detail::log_half_cauchy_logscale(value);
    for (Eigen::Index j = 1; j < d; ++j)
        total += detail::log_normal_density(
            theta[j], theta[layout.log_lambda_index(j)] + value);
    return total;
}

/// Full log prior of the parameter vector (log-scale latents included with
/// their Jacobian terms).
inline double log_prior(const GlmModel& model, const ParameterLayout& layout,
                        const Eigen::VectorXd& theta) {
    if (theta.size() != layout.size())
        throw std::invalid_argument("log_prior: parameter length mismatch");
    if (!theta.allFinite())
        throw std::invalid_argument("log_prior: non-finite parameter");
    if (model.prior.kind == PriorSpec::Kind::IsotropicGaussian) {
        const double log_sd = std::log(model.prior.sd);
        double total = 0.0;
        for (Eigen::Index j = 0; j < layout.d; ++j)
            total += detail::log_normal_density(theta[j], log_sd);
        return total;
    }
    double total = detail::log_t3_density(theta[0]);
    const double log_tau = theta[layout.log_tau_index()];
    for (Eigen::Index j = 1; j < layout.d; ++j) {
        const double log_lambda = theta[layout.log_lambda_index(j)];
        total += detail::log_normal_density(theta[j], log_lambda + log_tau);
        total += detail::log_half_cauchy_logscale(log_lambda);
    }
    total += detail::log_half_cauchy_logscale(log_tau);
    return total;
}

#ifndef NDEBUG
namespace detail {
// Debug-build spot check: one row of the cache against a fresh dot product.
inline void check_cache_row(const LinearPredictorCache& cache,
                            const Dataset& dataset,
                            const Eigen::VectorXd& theta, Eigen::Index i) {
    const double fresh = dataset.X().row(i).dot(theta.head(dataset.d()));
    if (std::abs(cache.values[i] - fresh) > 1e-6 * (1.0 + std::abs(fresh)))
        throw std::logic_error("conditional_logdensity: cache inconsistent with theta");
}
} // namespace detail
#endif

/// Conditional log density of coordinate k at `value` given the rest, up to
/// an additive constant. Regression coordinates use the predictor cache
/// (O(n), one core multiply-add per data point); scale latents touch only
/// prior terms and are independent of the data.
inline double conditional_logdensity(const GlmModel& model,
                                     const Dataset& dataset,
                                     const LinearPredictorCache& cache,
                                     Eigen::Index k,
                                     const Eigen::VectorXd& theta,
                                     double value, OpCounter* ops = nullptr) {
    const ParameterLayout layout = layout_for(model, dataset.d());
    const double prior_part =
        prior_terms_for_coordinate(model, layout, theta, k, value);
    if (!layout.is_regression(k)) return prior_part;

#ifndef NDEBUG
    detail::check_cache_row(cache, dataset, theta, k % dataset.n());
#endif

    const double theta_k = theta[k];
    const Eigen::VectorXd& y = dataset.y();
    const double* eta = cache.values.data();
    double loglik = 0.0;
    const Eigen::Index n = dataset.n();
    if (value == theta_k) {
        for (Eigen::Index i = 0; i < n; ++i)
            loglik += bernoulli_logit_term(y[i], eta[i]);
    } else {
        const double delta = value - theta_k;
        const double* col = dataset.X().col(k).data();
        for (Eigen::Index i = 0; i < n; ++i)
            loglik += bernoulli_logit_term(y[i], eta[i] + delta * col[i]);
        count_ops(ops, static_cast<std::uint64_t>(n));
    }
    return loglik + prior_part;
}

/// Same conditional without the cache: every evaluation recomputes each
/// x_i·θ from scratch (d multiply-adds per data point). Reference path for
/// the cached/naive equivalence checks and the cost-scaling experiments.
inline double conditional_logdensity_naive(const GlmModel& model,
                                           const Dataset& dataset,
                                           Eigen::Index k,
                                           const Eigen::VectorXd& theta,
                                           double value,
                                           OpCounter* ops = nullptr) {
    const ParameterLayout layout = layout_for(model, dataset.d());
    const double prior_part =
        prior_terms_for_coordinate(model, layout, theta, k, value);
    if (!layout.is_regression(k)) return prior_part;

    const Eigen::Index n = dataset.n();
    const Eigen::Index d = dataset.d();
    const Eigen::VectorXd& y = dataset.y();
    const Eigen::MatrixXd& X = dataset.X();
    double loglik = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double eta = 0.0;
        for (Eigen::Index j = 0; j < d; ++j)
            eta += (j == k ? value : theta[j]) * X(i, j);
        loglik += bernoulli_logit_term(y[i], eta);
    }
    count_ops(ops, static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(d));
    return loglik + prior_part;
}

} // namespace cggibbs

#endif
