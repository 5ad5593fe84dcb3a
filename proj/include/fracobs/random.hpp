#pragma once

// Seeded random helpers with platform-independent output.
// The std distributions are implementation-defined, so draws are mapped
// from raw mt19937_64 words by hand.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "fracobs/pattern.hpp"

namespace fracobs {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Seeds from several words, e.g. (seed, level, trial), so parallel trials stay reproducible.
    Rng(std::initializer_list<std::uint64_t> words) : engine_(mix(words)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), bound > 0 (Lemire's method with rejection).
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool coin() { return (next() >> 63) != 0; }

    /// `count` distinct values from [0, universe), in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample(std::size_t universe, std::size_t count) {
        std::vector<std::size_t> pool(universe);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        if (count > universe) count = universe;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(universe - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(count);
        return pool;
    }

private:
    static std::uint64_t mix(std::initializer_list<std::uint64_t> words) {
        // splitmix64 chain
        std::uint64_t h = 0x9E3779B97F4A7C15ULL;
        for (auto w : words) {
            h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
            std::uint64_t z = (h += 0x9E3779B97F4A7C15ULL);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            h = z ^ (z >> 31);
        }
        return h;
    }

    std::mt19937_64 engine_;
};

/// Square pattern with exactly `entries` positions drawn uniformly from all n^2 (diagonal included).
inline Pattern random_pattern_exact(std::size_t n, std::size_t entries, Rng& rng) {
    Pattern p(n, n);
    for (auto idx : rng.sample(n * n, entries)) p.set(idx / n, idx % n);
    return p;
}

/// Square pattern with each of the n^2 positions present independently with probability `density`.
inline Pattern random_pattern_bernoulli(std::size_t n, double density, Rng& rng) {
    Pattern p(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (rng.uniform() < density) p.set(r, c);
    return p;
}

} // namespace fracobs
