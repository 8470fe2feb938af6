#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "dtsync/rng.hpp"

using namespace dtsync;

TEST_CASE("counter draws are deterministic and stream-separated") {
    const std::uint64_t a = rng::derive(42, 1);
    const std::uint64_t b = rng::derive(42, 2);
    REQUIRE(a != b);
    REQUIRE(rng::at(a, 7) == rng::at(a, 7));
    REQUIRE(rng::at(a, 7) != rng::at(a, 8));
    REQUIRE(rng::at(a, 7) != rng::at(b, 7));
    // Nested addressing composes the same way every time.
    REQUIRE(rng::at3(a, 1, 2, 3) == rng::at(rng::at(rng::at(a, 1), 2), 3));
}

TEST_CASE("unit-open mapping stays strictly inside (0,1)") {
    REQUIRE(rng::to_unit_open(0) > 0.0);
    REQUIRE(rng::to_unit_open(~0ULL) < 1.0);
    const std::uint64_t s = rng::derive(7, 3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng::to_unit_open(rng::at(s, i));
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("uniform mapping respects bounds") {
    const std::uint64_t s = rng::derive(9, 4);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng::to_uniform(rng::at(s, i), 2.0, 8.0);
        REQUIRE(u >= 2.0);
        REQUIRE(u < 8.0);
    }
}

TEST_CASE("exponential variates are positive with unit mean") {
    const std::uint64_t s = rng::derive(11, 5);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double e = rng::to_exponential(rng::at(s, i));
        REQUIRE(e > 0.0);
        sum += e;
    }
    // Standard error is 1/sqrt(n) ~ 0.0022; allow 5 sigma.
    REQUIRE(std::abs(sum / n - 1.0) < 0.012);
}

TEST_CASE("index mapping covers [0,n) roughly uniformly") {
    const std::uint64_t s = rng::derive(13, 6);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) {
        const std::uint64_t idx = rng::to_index(rng::at(s, i), 10);
        REQUIRE(idx < 10);
        ++counts[idx];
    }
    for (int c : counts) {
        REQUIRE(c > 9000);
        REQUIRE(c < 11000);
    }
}

TEST_CASE("sequential stream reproduces itself from the same seed") {
    rng::Stream a(1234);
    rng::Stream b(1234);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());
}
