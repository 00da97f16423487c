#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ebids {

// SplitMix64, used to mix seed material into well-separated streams.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Order-independent stream derivation: every (master_seed, label, a, b)
// tuple maps to a fixed 64-bit seed, regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    SplitMix64 mix{master};
    std::uint64_t s = mix.next();
    mix.state = s ^ fnv1a64(label);
    s = mix.next();
    mix.state = s ^ a;
    s = mix.next();
    mix.state = s ^ b;
    return mix.next();
}

// Value-semantic random stream. Uniform and normal draws are generated with
// fixed bit-level algorithms (not std::distributions) so traces replay
// identically across standard library implementations.
class Rng {
  public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline Rng make_stream(std::uint64_t master, std::string_view label,
                       std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(derive_seed(master, label, a, b));
}

} // namespace ebids
