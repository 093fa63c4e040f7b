#include <doctest.h>

#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace cvqkd;

TEST_CASE("selection: serial and parallel counts are identical") {
    for (double t : {0.0, 0.3, 0.8, 2.0}) {
        const kernels::SelectionParams p{0.5333, 0.5, t};
        const auto a = kernels::selection(p, 300000, 17, Exec::serial);
        const auto b = kernels::selection(p, 300000, 17, Exec::parallel);
        CHECK(a.events == b.events);
        CHECK(a.kept == b.kept);
        CHECK(a.kept_errors == b.kept_errors);
        CHECK(a.errors == b.errors);
    }
}

TEST_CASE("selection: kept events shrink with the threshold") {
    std::size_t prev = SIZE_MAX;
    for (double t : {0.0, 0.2, 0.5, 1.0, 1.5}) {
        const auto c = kernels::selection({0.6, 0.5, t}, 100000, 4, Exec::parallel);
        CHECK(c.kept <= prev);
        CHECK(c.kept_errors <= c.errors);
        prev = c.kept;
    }
}

TEST_CASE("dual detector: serial and parallel moments agree") {
    for (bool mod : {false, true}) {
        const auto a = kernels::dual_detector({0.6, mod}, 100003, 3, Exec::serial);
        const auto b = kernels::dual_detector({0.6, mod}, 100003, 3, Exec::parallel);
        CHECK(a.n == b.n);
        CHECK(a.sxy == doctest::Approx(b.sxy).epsilon(1e-10));
        CHECK(a.sxx == doctest::Approx(b.sxx).epsilon(1e-10));
        CHECK(a.correlation() == doctest::Approx(b.correlation()).epsilon(1e-9));
    }
}

TEST_CASE("events: serial and parallel arrays are identical") {
    for (bool eve : {false, true}) {
        const kernels::EventStageParams p{0.6, 0.36, 0.1, 11, 12, 13, eve};
        kernels::EventArrays a, b;
        kernels::events(p, 70001, a, Exec::serial);
        kernels::events(p, 70001, b, Exec::parallel);
        CHECK(a == b);
        CHECK(a.size() == 70001);
        CHECK(a.eve_x.size() == (eve ? 70001u : 0u));
    }
}

TEST_CASE("events: per-event draws do not depend on the batch size") {
    const kernels::EventStageParams p{0.6, 0.79, 0.0, 1, 2, 3, true};
    kernels::EventArrays small, big;
    kernels::events(p, 100, small, Exec::parallel);
    kernels::events(p, 5000, big, Exec::parallel);
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(small.bob_x[i] == big.bob_x[i]);
        CHECK(small.s2_bit[i] == big.s2_bit[i]);
        CHECK(small.eve_x[i] == big.eve_x[i]);
    }
}

TEST_CASE("events: bits and bases are balanced") {
    kernels::EventArrays a;
    kernels::events({0.6, 0.79, 0.0, 5, 6, 7, false}, 200000, a, Exec::parallel);
    double s2 = 0, s3 = 0, b = 0, both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s2 += a.s2_bit[i];
        s3 += a.s3_bit[i];
        b += a.basis[i];
        both += a.s2_bit[i] & a.s3_bit[i];
    }
    const double n = double(a.size()), tol = 4.0 * std::sqrt(0.25 / n);
    CHECK(std::abs(s2 / n - 0.5) < tol);
    CHECK(std::abs(s3 / n - 0.5) < tol);
    CHECK(std::abs(b / n - 0.5) < tol);
    CHECK(std::abs(both / n - 0.25) < 4.0 * std::sqrt(0.1875 / n));
}

TEST_CASE("toeplitz: word-packed kernels match the brute-force product") {
    gen::Gen g(41);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = g.integer(1, 400);
        const std::size_t m = g.integer(0, n + 70);
        const std::uint64_t seed = g.integer(0, UINT64_MAX);
        const auto in = g.bits(n);
        const auto d = kernels::toeplitz_diagonals(n, m, seed);
        REQUIRE(d.size() == (m == 0 ? 0 : n + m - 1));
        const auto want = m == 0 ? std::vector<std::uint8_t>{} : oracle::toeplitz_bruteforce(in, m, d);
        CHECK(kernels::toeplitz(in, m, seed, Exec::serial) == want);
        CHECK(kernels::toeplitz(in, m, seed, Exec::parallel) == want);
    }
}

TEST_CASE("toeplitz diagonals follow the documented bit layout") {
    const auto d = kernels::toeplitz_diagonals(100, 50, 9);
    RngStream rng(9);
    std::uint64_t w = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (k % 64 == 0) w = rng();
        CHECK(d[k] == ((w >> (k % 64)) & 1u));
    }
}

TEST_CASE("toeplitz edge cases") {
    CHECK(kernels::toeplitz({}, 5, 1, Exec::serial) == std::vector<std::uint8_t>(5, 0));
    const std::vector<std::uint8_t> in{1, 0, 1};
    CHECK(kernels::toeplitz(in, 0, 1, Exec::parallel).empty());
}
