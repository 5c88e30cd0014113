#pragma once

#include <array>
#include <cstdint>

namespace dispersal::rng {

// Master seed plus a stream counter. Child streams are derived by hashing
// (master, stream) so that replicate r can always be reproduced in isolation
// and results do not depend on scheduling order.
struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

// splitmix64 step: advances `state` and returns a mixed 64-bit value.
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256++ with splitmix64-based seeding. Self-contained so that output
// is bit-identical across standard libraries and platforms.
class Stream {
public:
    explicit Stream(SeedSpec seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi);

    // Unit-mean exponential.
    double exponential();

    // Standard normal via Box-Muller (two uniforms per call, no caching, so
    // the draw count per call is fixed).
    double normal01();

    // Poisson count by exponential arrivals, chunked so large means stay
    // exact; consumes a data-dependent but seed-determined number of draws.
    std::uint64_t poisson(double mean);

private:
    std::array<std::uint64_t, 4> state_;
};

}  // namespace dispersal::rng
