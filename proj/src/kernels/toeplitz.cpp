#include <bit>
#include <cstdint>
#include <vector>

#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"

// out_i = XOR_j T(i, j) x_j with T(i, j) = d[i - j + n - 1]. Writing
// y_k = x_{n-1-k} turns every row into a sliding window: out_i = XOR_k y_k d[i + k],
// which is a word-wise AND + popcount against d shifted by i.

namespace cvqkd::kernels {

namespace {

using Word = std::uint64_t;

std::vector<Word> diagonal_words(std::size_t n_bits, std::uint64_t seed, std::size_t pad) {
    RngStream rng(seed);
    std::vector<Word> d((n_bits + 63) / 64 + pad, 0);
    for (std::size_t w = 0; w < (n_bits + 63) / 64; ++w)
        d[w] = rng();
    if (n_bits % 64 != 0)
        d[n_bits / 64] &= (Word{1} << (n_bits % 64)) - 1;
    return d;
}

struct Prepared {
    std::vector<Word> reversed_input;
    std::vector<std::vector<Word>> shifted; // shifted[s][w] = d bits [64w + s, 64w + s + 64)
};

Prepared prepare(std::span<const std::uint8_t> input, std::size_t out_len, std::uint64_t seed) {
    const std::size_t n = input.size();
    Prepared p;
    p.reversed_input.assign((n + 63) / 64, 0);
    for (std::size_t k = 0; k < n; ++k)
        if (input[n - 1 - k] & 1)
            p.reversed_input[k / 64] |= Word{1} << (k % 64);

    const std::vector<Word> d = diagonal_words(n + out_len - 1, seed, 2);
    p.shifted.assign(64, std::vector<Word>(d.size() - 1, 0));
    for (std::size_t s = 0; s < 64; ++s)
        for (std::size_t w = 0; w + 1 < d.size(); ++w)
            p.shifted[s][w] = s == 0 ? d[w] : (d[w] >> s) | (d[w + 1] << (64 - s));
    return p;
}

std::uint8_t row(const Prepared& p, std::size_t i) {
    const auto& d = p.shifted[i % 64];
    const std::size_t offset = i / 64;
    Word acc = 0;
    for (std::size_t w = 0; w < p.reversed_input.size(); ++w)
        acc ^= p.reversed_input[w] & d[w + offset];
    return static_cast<std::uint8_t>(std::popcount(acc) & 1);
}

} // namespace

std::vector<std::uint8_t> toeplitz_diagonals(std::size_t n_in, std::size_t m_out, std::uint64_t seed) {
    const std::size_t len = n_in + m_out - 1;
    const std::vector<Word> d = diagonal_words(len, seed, 0);
    std::vector<std::uint8_t> bits(len);
    for (std::size_t k = 0; k < len; ++k)
        bits[k] = static_cast<std::uint8_t>((d[k / 64] >> (k % 64)) & 1);
    return bits;
}

namespace serial {

std::vector<std::uint8_t> toeplitz(std::span<const std::uint8_t> input, std::size_t out_len,
                                   std::uint64_t seed) {
    if (out_len == 0 || input.empty())
        return std::vector<std::uint8_t>(out_len, 0);
    const Prepared p = prepare(input, out_len, seed);
    std::vector<std::uint8_t> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i)
        out[i] = row(p, i);
    return out;
}

} // namespace serial

namespace omp {

std::vector<std::uint8_t> toeplitz(std::span<const std::uint8_t> input, std::size_t out_len,
                                   std::uint64_t seed) {
    if (out_len == 0 || input.empty())
        return std::vector<std::uint8_t>(out_len, 0);
    const Prepared p = prepare(input, out_len, seed);
    std::vector<std::uint8_t> out(out_len);
    const auto count = static_cast<std::int64_t>(out_len);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = row(p, static_cast<std::size_t>(i));
    return out;
}

} // namespace omp

std::vector<std::uint8_t> toeplitz(std::span<const std::uint8_t> input, std::size_t out_len,
                                   std::uint64_t seed, Exec exec) {
    return exec == Exec::serial ? serial::toeplitz(input, out_len, seed)
                                : omp::toeplitz(input, out_len, seed);
}

} // namespace cvqkd::kernels
