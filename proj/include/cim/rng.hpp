#pragma once

#include <cstdint>
#include <vector>

namespace cim {

// Counter-based key derivation. All randomness in the project flows through
// these mixers so that results are reproducible bit-for-bit across runs and
// independent of evaluation order.

/// splitmix64 finalizer: bijective avalanche mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derive a child key from a parent key and a stream index.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t stream) noexcept {
    return mix64(parent ^ (0xD1B54A32D192ED03ull * (stream + 1)));
}

/// FNV-1a 64-bit hash, used for name-keyed noise streams and artifact hashes.
std::uint64_t fnv1a64(const void* bytes, std::size_t len,
                      std::uint64_t seed = 0xCBF29CE484222325ull) noexcept;

/// Sequential deterministic generator built on the splitmix64 stream.
/// Uniform mappings are spelled out explicitly instead of relying on
/// <random> distributions, which are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;

    /// Standard normal draw (Box-Muller, cos branch only, stateless per call).
    double normal() noexcept;

    /// Seeded Fisher-Yates shuffle of an index span.
    template <typename T>
    void shuffle(std::vector<T>& v) noexcept {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Identity permutation 0..n-1.
std::vector<std::size_t> iota_indices(std::size_t n);

}  // namespace cim
