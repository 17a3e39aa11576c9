#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sr {

// Deterministic random stream. All randomness in the library flows through
// this wrapper so that a seed reproduces the same run on any platform:
// std::mt19937_64 output is fully specified by the standard, and the
// mappings below (rejection sampling for bounded draws, 53-bit mantissa
// construction for unit reals, Fisher-Yates for shuffles) are pinned here
// instead of relying on implementation-defined std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased draw from [0, n). Rejection sampling on the top of the range.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return static_cast<std::size_t>(x % span);
    }

    // Uniform double in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // In-place Fisher-Yates, swapping from the back: j = uniform_index(i+1).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // Identity permutation of {0..n-1}, then shuffled.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 gen_;
};

// 64-bit FNV-1a, used to derive per-cell seeds from string identities.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// splitmix64 finalizer; mixes a master seed with a cell hash.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t cell_hash) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull + cell_hash;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace sr
