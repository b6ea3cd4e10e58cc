#ifndef CGGIBBS_OPCOUNT_HPP
#define CGGIBBS_OPCOUNT_HPP

#include <cstdint>

namespace cggibbs {

/// Multiply-add counter threaded through the likelihood hot paths.
/// Machine-independent cost measure; scaling claims are asserted on these
/// counts rather than wall clock.
struct OpCounter {
    std::uint64_t multiply_adds = 0;

    void add(std::uint64_t n) { multiply_adds += n; }
    void reset() { multiply_adds = 0; }
};

inline void count_ops(OpCounter* ops, std::uint64_t n) {
    if (ops != nullptr) ops->multiply_adds += n;
}

} // namespace cggibbs

#endif
