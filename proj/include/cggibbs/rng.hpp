#ifndef CGGIBBS_RNG_HPP
#define CGGIBBS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace cggibbs {

/// Counter-based splittable pseudorandom stream.
///
/// Each draw applies the SplitMix64 output mix to key + counter, so the
/// stream is a pure function of (seed, stream id, counter). Child streams
/// are derived by hashing the parent key with the child index, which lets
/// replicated chains, sweep schedules and data generators consume
/// non-overlapping streams from one master seed.
class RngStream {
public:
    RngStream() : RngStream(0) {}
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + kGolden) ^ mix(stream + kStreamSalt))), counter_(0) {}

    /// Independent child stream; deterministic in (parent key, child index).
    RngStream split(std::uint64_t child) const {
        RngStream r;
        r.key_ = mix(key_ ^ mix(child + kSplitSalt));
        r.counter_ = 0;
        return r;
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

    /// Uniform on [0,1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Exponential(1).
    double exponential() { return -std::log(uniform_pos()); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // 64-bit multiply-shift; bias is negligible for n << 2^64.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kStreamSalt = 0x1F123BB5159A55E5ull;
    static constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace cggibbs

#endif
