#pragma once

#include <cstdint>
#include <random>

namespace phasekit {

/// Reproducible Gaussian stream keyed by (seed, stream_index).
///
/// Each trajectory owns one stream, so an ensemble draws the same numbers
/// whatever the worker count or scheduling order.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index) : seed_(seed), index_(stream_index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_index),
                          static_cast<std::uint32_t>(stream_index >> 32), 0x5eedu};
        engine_.seed(seq);
    }

    /// Standard normal draw (libstdc++ uses the Marsaglia polar method).
    double gaussian() {
        ++draws_;
        return normal_(engine_);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return index_; }
    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline RandomStream stream_for_trajectory(std::uint64_t master_seed, std::uint64_t trajectory_index) {
    return RandomStream(master_seed, trajectory_index);
}

}  // namespace phasekit
