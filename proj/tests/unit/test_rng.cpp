#include <doctest.h>

#include "cvqkd/rng.hpp"

using cvqkd::RngStream;

TEST_CASE("derived streams are reproducible and distinct") {
    auto a = RngStream::derive(7, 3), b = RngStream::derive(7, 3), c = RngStream::derive(7, 4);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
}
