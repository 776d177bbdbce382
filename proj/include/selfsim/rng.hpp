#pragma once

#include <cstdint>

namespace selfsim {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream tags keep independent consumers of one seed apart.
enum class StreamTag : std::uint64_t {
    pointwise = 1,
    birkhoff = 2,
    orbit = 3,
    distribution = 4,
    origin2d = 5,
    sampler = 6,
    test = 99,
};

// Counter-based generator: the value at position i depends only on (seed, tag, index, i).
class Stream {
public:
    Stream(std::uint64_t seed, StreamTag tag, std::uint64_t index)
        : key_(splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag))) + index)) {}

    std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do x = next();
        while (x >= limit);
        return x % n;
    }

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace selfsim
