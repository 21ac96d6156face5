#include "cim/rng.hpp"

#include <cmath>
#include <numbers>

namespace cim {

std::uint64_t fnv1a64(const void* bytes, std::size_t len, std::uint64_t seed) noexcept {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) noexcept {
    // Rejection-free modulo is biased for huge n; n here is always small
    // (dataset sizes, choice-list cardinalities), so multiply-shift is exact enough
    // and keeps the draw count per call fixed at one.
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

double Rng::normal() noexcept {
    // Box-Muller. u1 in (0,1], u2 in [0,1).
    std::uint64_t bits = next_u64();
    double u1 = (static_cast<double>(bits >> 32) + 1.0) * 0x1.0p-32;
    double u2 = static_cast<double>(bits & 0xFFFFFFFFull) * 0x1.0p-32;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

}  // namespace cim
