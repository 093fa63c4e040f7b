#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace cvqkd {

/// Counter-based random stream. Draw `k` of a stream is a pure function of
/// (seed, k), so per-event streams can be generated in any order or on any
/// number of threads and still reproduce the same sequence.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed = 0) noexcept : seed_(seed) {}

    /// Independent child stream, e.g. one per event or per worker.
    static RngStream derive(std::uint64_t master, std::uint64_t index) noexcept {
        return RngStream(mix(master ^ mix(index + kGolden)));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(seed_ + (++counter_) * kGolden); }

    bool bit() noexcept { return ((*this)() >> 63) != 0; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double normal() {
        std::normal_distribution<double> dist;
        return dist(*this);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace cvqkd
