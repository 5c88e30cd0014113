#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "dispersal/rng.hpp"

using dispersal::rng::SeedSpec;
using dispersal::rng::Stream;

TEST_CASE("splitmix64 is a pure function of its state") {
    std::uint64_t a = 42, b = 42;
    const std::uint64_t va = dispersal::rng::splitmix64(a);
    const std::uint64_t vb = dispersal::rng::splitmix64(b);
    CHECK(va == vb);
    CHECK(a == b);
    CHECK(a != 42);  // state advanced
    CHECK(dispersal::rng::splitmix64(a) != va);
}

TEST_CASE("streams are reproducible and stream-separated") {
    Stream s1({123, 7});
    Stream s2({123, 7});
    Stream s3({123, 8});
    Stream s4({124, 7});
    bool differs3 = false, differs4 = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t v = s1.next_u64();
        CHECK(v == s2.next_u64());
        differs3 |= v != s3.next_u64();
        differs4 |= v != s4.next_u64();
    }
    CHECK(differs3);
    CHECK(differs4);
}

TEST_CASE("uniform01 stays in [0,1) and has the right mean") {
    Stream s({2024, 0});
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // sd = 1/sqrt(12), 4 standard errors
    const double se = 1.0 / std::sqrt(12.0 * n);
    CHECK(std::abs(sum / n - 0.5) < 4.0 * se);
}

TEST_CASE("uniform(lo,hi) respects bounds") {
    Stream s({5, 5});
    for (int i = 0; i < 1000; ++i) {
        const double u = s.uniform(-2.5, 1.5);
        REQUIRE(u >= -2.5);
        REQUIRE(u < 1.5);
    }
}

TEST_CASE("exponential is nonnegative with unit mean") {
    Stream s({99, 1});
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = s.exponential();
        REQUIRE(e >= 0.0);
        sum += e;
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n - 1.0) < 4.0 * se);
}

TEST_CASE("normal01 has zero mean and unit variance") {
    Stream s({7, 3});
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal01();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    // Var of the variance estimate is 2/n for normals.
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("poisson matches its mean for small and large intensities") {
    Stream s({31, 0});
    for (double mean : {0.3, 3.7, 47.0, 300.0}) {
        const int n = mean > 100 ? 20000 : 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += static_cast<double>(s.poisson(mean));
        const double se = std::sqrt(mean / n);
        CHECK(std::abs(sum / n - mean) < 4.0 * se);
    }
}

TEST_CASE("poisson(0) is identically zero") {
    Stream s({1, 1});
    for (int i = 0; i < 100; ++i) CHECK(s.poisson(0.0) == 0);
}
