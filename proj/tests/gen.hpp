#pragma once

// Seeded generators for property tests.

#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(eng_);
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(eng_); }

    std::vector<std::uint8_t> bits(std::size_t n, double p_one = 0.5) {
        std::vector<std::uint8_t> b(n);
        for (auto& v : b) v = coin(p_one);
        return b;
    }

    // Copy of `bits` with each position flipped with probability p.
    std::vector<std::uint8_t> noisy(const std::vector<std::uint8_t>& bits, double p) {
        auto out = bits;
        for (auto& v : out) v ^= static_cast<std::uint8_t>(coin(p));
        return out;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace gen
