#ifndef CGGIBBS_SCHEDULE_HPP
#define CGGIBBS_SCHEDULE_HPP

#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "cggibbs/rng.hpp"

namespace cggibbs {

/// Coordinate visit schedule for one Gibbs sweep.
///   Dugs: deterministic scan 0..D-1.
///   Rpgs: a fresh uniform permutation of 0..D-1 each sweep.
///   Rsgs: D coordinates drawn iid uniformly (repeats allowed).
enum class ScanOrder { Dugs, Rpgs, Rsgs };

inline void sweep_order(ScanOrder scan, Eigen::Index size, RngStream& rng,
                        std::vector<Eigen::Index>& order) {
    if (size <= 0) throw std::invalid_argument("sweep_order: size must be positive");
    order.resize(static_cast<std::size_t>(size));
    switch (scan) {
    case ScanOrder::Dugs:
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        break;
    case ScanOrder::Rpgs:
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        // Fisher-Yates driven by the chain's own stream for reproducibility.
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
            std::swap(order[i - 1], order[j]);
        }
        break;
    case ScanOrder::Rsgs:
        for (auto& k : order)
            k = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(size)));
        break;
    }
}

} // namespace cggibbs

#endif
