// Deterministic RNG helpers. All randomized steps in the library draw through
// this wrapper so results do not depend on standard-library distribution
// implementations.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace loadshape {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    /// Uniform in [lo, hi).
    double uniform_real(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;  // [0,1)
        return lo + (hi - lo) * u;
    }

    /// Box-Muller transform.
    double gaussian(double mean, double sd) {
        const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0,1]
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + sd * z;
    }

    /// Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

    /// First k entries of a partial Fisher-Yates over [0, n); all k indices
    /// are distinct. Order matters to callers (e.g. it fixes cluster indices).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(idx[i], idx[i + uniform_index(n - i)]);
        }
        idx.resize(k);
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

/// Stable per-stream seed derivation (splitmix64 step), used to give each
/// household or restart its own reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace loadshape
