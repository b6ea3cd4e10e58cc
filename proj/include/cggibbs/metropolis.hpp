#ifndef CGGIBBS_METROPOLIS_HPP
#define CGGIBBS_METROPOLIS_HPP

#include <cmath>
#include <stdexcept>

#include "cggibbs/rng.hpp"

namespace cggibbs {

/// Random-walk Metropolis settings for one coordinate update.
struct MhConfig {
    double step_sd = 0.5;
};

struct MhResult {
    double x;            ///< state after the accept/reject decision
    double log_density;  ///< target log density at x
    bool accepted;
    int evals;           ///< target evaluations consumed (always 1)
};

/// One symmetric Gaussian random-walk Metropolis update. The caller supplies
/// the current log density, so each update costs exactly one fresh target
/// evaluation at the proposal.
template <typename F>
MhResult mh_update(F&& log_density, double x0, double logf_x0,
                   const MhConfig& cfg, RngStream& rng) {
    if (!(cfg.step_sd > 0.0))
        throw std::invalid_argument("mh_update: step_sd must be positive");
    if (!std::isfinite(logf_x0))
        throw std::invalid_argument("mh_update: log density at current point not finite");

    const double proposal = x0 + cfg.step_sd * rng.normal();
    const double logf_proposal = log_density(proposal);
    const double log_u = std::log(rng.uniform_pos());
    if (log_u < logf_proposal - logf_x0)
        return MhResult{proposal, logf_proposal, true, 1};
    return MhResult{x0, logf_x0, false, 1};
}

} // namespace cggibbs

#endif
