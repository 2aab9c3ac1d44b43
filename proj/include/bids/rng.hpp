#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bids {

// SplitMix64 step. Used for seed derivation so that replicate streams are a
// pure function of (master seed, replicate index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a42d4c7ab1f5ULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t stream = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xd1342543de82ef95ULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (stream * 0x2545f4914f6cdd1dULL);
    return splitmix64(s);
}

// Seeded generator: mt19937_64 engine with explicit Box-Muller normals and a
// 53-bit uniform, so the sampling path is fully specified by this header and
// not by the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Rademacher sign in {-1, +1}.
    int sign() { return (engine_() & 1u) ? 1 : -1; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bids
