#pragma once

#include <cstdint>

namespace vbcert {

/// SplitMix64 generator. Chosen for the published, platform-independent
/// seed-to-stream mapping: the state advances by the golden-ratio constant
/// and each output is the finalized state. next_double() takes the top 53
/// bits, giving a uniform value in [0, 1). This mapping is part of the
/// tool's stable interface; sampled trajectories must not change across
/// releases.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace vbcert
