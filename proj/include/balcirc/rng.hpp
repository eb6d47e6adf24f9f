#pragma once

#include <cstdint>

// All randomness in the library flows through splitmix64 so that runs are
// reproducible bit-for-bit across platforms and thread schedules. Streams
// are derived by hashing (seed, index) counters, never by sharing state.

namespace balcirc {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer (Steele, Lea, Vigna).
inline std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derived seed for sub-stream `index` of `base`: the index-th output of the
/// splitmix64 sequence started at `base`.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base + index * kGolden);
}

/// Counter-based hash for per-(step, item) decisions; order-independent.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + kGolden));
    return h;
}

/// Minimal sequential generator over the splitmix64 stream.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += kGolden;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0,1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0,1]; used where an inclusive upper endpoint is required.
    double next_unit_open_closed() {
        return 1.0 - next_unit();
    }

    /// Unbiased uniform integer in [0, bound); bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t x, r;
        do {
            x = next();
            r = x % bound;
        } while (x - r > std::uint64_t(-1) - (bound - 1));
        return r;
    }
};

} // namespace balcirc
