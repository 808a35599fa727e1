#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace gridattack {

// splitmix64 stream. The standard-library distributions are allowed to
// differ between library implementations, which would break byte-stable
// dataset exports, so every random draw in this project goes through this
// generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

// Standard Gaussian samples via the Box-Muller transform on a SplitMix64
// stream. Both values of each pair are consumed, so the sequence for a given
// seed is fixed.
class GaussianGen {
public:
    explicit GaussianGen(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = rng_.next_double();
        double u2 = rng_.next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    SplitMix64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// FNV-1a hash of a string tag, used to salt seed derivations.
inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic child seed from a base seed and an integer salt.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    SplitMix64 rng(base ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    rng.next();
    return rng.next();
}

/// Deterministic child seed from a base seed and a stage tag.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    return derive_seed(base, hash_tag(tag));
}

/// In-place Fisher-Yates shuffle driven by a SplitMix64 stream.
template <typename T>
void shuffle(std::vector<T>& values, SplitMix64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next() % i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace gridattack
