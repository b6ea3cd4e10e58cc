#ifndef CGGIBBS_CACHE_HPP
#define CGGIBBS_CACHE_HPP

#include <stdexcept>

#include <Eigen/Core>

#include "cggibbs/dataset.hpp"
#include "cggibbs/opcount.hpp"

namespace cggibbs {

/// Cached linear predictors x_i·θ, one per observation.
///
/// The cache is what turns a coordinate proposal's likelihood evaluation
/// from O(dn) into O(n): the proposed predictor for one data point is the
/// cached value adjusted by the single changed term. refresh_counter counts
/// sweeps since the last full rebuild; the sampler rebuilds periodically to
/// bound floating-point drift.
struct LinearPredictorCache {
    Eigen::VectorXd values;
    int refresh_counter = 0;
};

/// One-time O(dn) build of the predictor cache from the regression block
/// (first d entries) of theta.
inline LinearPredictorCache cache_init(const Dataset& dataset,
                                       const Eigen::VectorXd& theta,
                                       OpCounter* ops = nullptr) {
    if (theta.size() < dataset.d())
        throw std::invalid_argument("cache_init: theta regression block shorter than d");
    LinearPredictorCache cache;
    cache.values = dataset.X() * theta.head(dataset.d());
    cache.refresh_counter = 0;
    count_ops(ops, static_cast<std::uint64_t>(dataset.n()) *
                       static_cast<std::uint64_t>(dataset.d()));
    return cache;
}

/// Predictor for data point i if coordinate j moved from theta_j to
/// theta_j_new; O(1), one core multiply-add.
inline double proposed_linear_predictor(const LinearPredictorCache& cache,
                                        const Dataset& dataset,
                                        Eigen::Index i, Eigen::Index j,
                                        double theta_j, double theta_j_new,
                                        OpCounter* ops = nullptr) {
    if (i < 0 || i >= dataset.n())
        throw std::out_of_range("proposed_linear_predictor: row index out of range");
    if (j < 0 || j >= dataset.d())
        throw std::out_of_range("proposed_linear_predictor: column index out of range");
    count_ops(ops, 1);
    return cache.values[i] + (theta_j_new - theta_j) * dataset.x(i, j);
}

/// Accepted move of coordinate j: in-place O(n) cache update. Sparse data
/// touches only the stored nonzeros of column j. refresh_counter unchanged.
inline void cache_commit(LinearPredictorCache& cache, const Dataset& dataset,
                         Eigen::Index j, double theta_j, double theta_j_new,
                         OpCounter* ops = nullptr) {
    if (j < 0 || j >= dataset.d())
        throw std::out_of_range("cache_commit: column index out of range");
    double* values = cache.values.data();
    std::uint64_t touched = 0;
    const double delta = theta_j_new - theta_j;
    dataset.for_each_in_column(j, [&](Eigen::Index i, double x_ij) {
        values[i] += delta * x_ij;
        ++touched;
    });
    count_ops(ops, touched);
}

/// Full rebuild; same contract as cache_init but resets refresh_counter in
/// place. Used every refresh interval to cancel accumulated round-off.
inline void cache_refresh(LinearPredictorCache& cache, const Dataset& dataset,
                          const Eigen::VectorXd& theta,
                          OpCounter* ops = nullptr) {
    if (theta.size() < dataset.d())
        throw std::invalid_argument("cache_refresh: theta regression block shorter than d");
    cache.values.noalias() = dataset.X() * theta.head(dataset.d());
    cache.refresh_counter = 0;
    count_ops(ops, static_cast<std::uint64_t>(dataset.n()) *
                       static_cast<std::uint64_t>(dataset.d()));
}

} // namespace cggibbs

#endif
