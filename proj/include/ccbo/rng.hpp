#pragma once
// Deterministic, cross-platform random number generation.
//
// The standard <random> distributions are not required to produce identical
// streams across implementations, so every stochastic component of the
// library draws from this generator instead: xoshiro256++ seeded via
// SplitMix64, with explicit double / Gaussian / integer conversions.
// Identical seeds yield bit-identical streams on every platform.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ccbo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n >= 1, via rejection sampling (unbiased).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via the Marsaglia polar method (one spare cached).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

private:
    std::uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Splittable stream derivation: hash an arbitrary mix of strings and integers
// into a child seed. Used so that every (problem, seed-index, purpose) triple
// owns an independent, reproducible stream; adding new purposes never
// perturbs existing ones.
class SeedMixer {
public:
    explicit SeedMixer(std::uint64_t master) : h_(master) { mix_word(0x7f4a7c15ULL); }

    SeedMixer& mix(std::uint64_t v) {
        mix_word(v);
        return *this;
    }

    SeedMixer& mix(std::string_view s) {
        // FNV-1a over the bytes, folded into the running state.
        std::uint64_t fnv = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            fnv ^= c;
            fnv *= 0x100000001b3ULL;
        }
        mix_word(fnv);
        return *this;
    }

    std::uint64_t seed() const {
        std::uint64_t s = h_;
        return detail::splitmix64(s);
    }

    Rng rng() const { return Rng(seed()); }

private:
    void mix_word(std::uint64_t v) {
        std::uint64_t s = h_ ^ v;
        h_ = detail::splitmix64(s) ^ (h_ * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
    }

    std::uint64_t h_;
};

}  // namespace ccbo
