#ifndef CGGIBBS_SLICE_HPP
#define CGGIBBS_SLICE_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "cggibbs/rng.hpp"

namespace cggibbs {

/// Univariate slice sampler settings: initial window width and the cap on
/// doubling steps (the interval can grow to w * 2^max_doublings).
struct SliceConfig {
    double w = 10.0;
    int max_doublings = 20;
};

struct SliceResult {
    double x;            ///< accepted point
    double log_density;  ///< target log density at x
    int evals;           ///< target evaluations consumed by this update
};

/// One slice-sampling update with the doubling procedure: draw a level under
/// logf(x0), grow a randomly positioned window by doubling until both ends
/// are below the level (or the cap is hit), then shrink toward x0 until a
/// point inside the slice passes the doubling acceptance test.
template <typename F>
SliceResult slice_update(F&& log_density, double x0, double logf_x0,
                         const SliceConfig& cfg, RngStream& rng) {
    if (!(cfg.w > 0.0)) throw std::invalid_argument("slice_update: w must be positive");
    if (cfg.max_doublings < 1)
        throw std::invalid_argument("slice_update: max_doublings must be >= 1");
    if (!std::isfinite(logf_x0))
        throw std::invalid_argument("slice_update: log density at current point not finite");

    int evals = 0;
    const auto f = [&](double x) {
        ++evals;
        return log_density(x);
    };

    const double z = logf_x0 - rng.exponential();

    double left = x0 - cfg.w * rng.uniform();
    double right = left + cfg.w;
    double logf_left = f(left);
    double logf_right = f(right);
    for (int k = cfg.max_doublings; k > 0 && (logf_left > z || logf_right > z); --k) {
        if (rng.uniform() < 0.5) {
            left -= right - left;
            logf_left = f(left);
        } else {
            right += right - left;
            logf_right = f(right);
        }
    }

    // Acceptance test for a candidate found after doubling: retrace the
    // halvings from (left, right) down to the initial width and reject if
    // the candidate sits across a split whose both halves are off-slice.
    const auto acceptable = [&](double x1) {
        double lo = left;
        double hi = right;
        bool differ = false;
        while (hi - lo > 1.1 * cfg.w) {
            const double mid = 0.5 * (lo + hi);
            if ((x0 < mid) != (x1 < mid)) differ = true;
            if (x1 < mid)
                hi = mid;
            else
                lo = mid;
            if (differ && f(lo) <= z && f(hi) <= z) return false;
        }
        return true;
    };

    double lo = left;
    double hi = right;
    for (int step = 0; step < 10000; ++step) {
        const double x1 = lo + rng.uniform() * (hi - lo);
        const double logf_x1 = f(x1);
        if (z < logf_x1 && acceptable(x1)) return SliceResult{x1, logf_x1, evals};
        if (x1 < x0)
            lo = x1;
        else
            hi = x1;
    }
    throw std::runtime_error("slice_update: shrinkage failed to terminate");
}

} // namespace cggibbs

#endif
