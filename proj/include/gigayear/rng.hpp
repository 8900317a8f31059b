#pragma once

#include <cmath>
#include <cstdint>

namespace gigayear {

// Counter-based random source. Every draw is a pure hash of
// (seed, stream, counter), so results do not depend on the order in which
// pixels or cracks are visited and parallel evaluation gives the same
// output as a serial loop.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t x = mix(seed_ ^ 0x9E3779B97F4A7C15ULL);
        x = mix(x ^ stream_);
        x = mix(x ^ counter);
        return x;
    }

    // Uniform in [0, 1).
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

    // Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    double normal(std::uint64_t counter) const {
        const double u1 = static_cast<double>((bits(2 * counter) >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    // splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace gigayear
