#include "dispersal/rng.hpp"

#include <cmath>

namespace dispersal::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Stream::Stream(SeedSpec seed) {
    // Mix the master seed once, fold in the stream id, then expand into the
    // four state words. Distinct (master, stream) pairs land in well-separated
    // states without any sequential advancing.
    std::uint64_t st = seed.master;
    st = splitmix64(st) ^ seed.stream;
    for (auto& word : state_) word = splitmix64(st);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t Stream::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Stream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Stream::exponential() {
    // 1 - U is in (0, 1], so the log is finite.
    return -std::log1p(-uniform01());
}

double Stream::normal01() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t Stream::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::uint64_t count = 0;
    double remaining = mean;
    // Counts over disjoint chunks are independent Poissons and add exactly.
    while (remaining > 0.0) {
        const double chunk = remaining < 256.0 ? remaining : 256.0;
        double t = exponential();
        while (t <= chunk) {
            ++count;
            t += exponential();
        }
        remaining -= chunk;
    }
    return count;
}

}  // namespace dispersal::rng
