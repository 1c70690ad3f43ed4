#pragma once

// Counter-based pseudo-random generation with documented stream splitting.
//
// Every stochastic operation in the library derives its randomness from a
// 64-bit master seed through the fixed recipe
//
//     child = mix64(mix64(master ^ fnv1a64(tag)) + index * PHI64)
//
// where mix64 is the SplitMix64 finalizer and PHI64 = floor(2^64 / phi) is the
// golden-ratio increment. Child streams are therefore independent of thread
// scheduling and replication order: replication i always sees the stream
// seeded by child_seed(master, tag, i), no matter which worker runs it.
//
// The standard-library <random> distributions are deliberately not used for
// value generation: their output sequences are implementation-defined, which
// would break bit-for-bit reproducibility across toolchains. All transforms
// (Box–Muller, inverse-CDF exponential, ...) are spelled out here.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace qflimit {

inline constexpr std::uint64_t kPhi64 = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// FNV-1a over the bytes of a purpose tag ("rep", "edges", ...).
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// The published master-seed -> child-seed derivation (see file header).
constexpr std::uint64_t child_seed(std::uint64_t master, std::string_view tag,
                                   std::uint64_t index) noexcept {
    return mix64(mix64(master ^ fnv1a64(tag)) + index * kPhi64);
}

/// SplitMix64 engine: counter plus finalizer. Tiny state, splittable, and
/// equidistributed far beyond what the Monte Carlo here consumes.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept { return mix64(state_ += kPhi64); }

    /// Uniform on the open interval (0,1); never returns 0 or 1, so log() and
    /// pow() transforms are safe.
    double next_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box–Muller; consumes exactly two uniforms per pair
    /// of outputs (the second value is cached, no rejection loop).
    double next_normal() noexcept {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    /// Exponential(1) via inverse CDF.
    double next_exponential() noexcept { return -std::log(next_unit()); }

    /// Uniform on {-1,+1} from the top bit.
    double next_sign() noexcept {
        return (next_u64() >> 63) ? 1.0 : -1.0;
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace qflimit
