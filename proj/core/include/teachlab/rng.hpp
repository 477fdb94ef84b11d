#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace teachlab {

// Deterministic, platform-independent randomness. std:: distributions are
// implementation-defined, so every draw here is written out explicitly.
// All streams in the project are spawned from a root seed via derive_seed,
// which keeps mask sampling, data order, and init independent of each other.

std::uint64_t splitmix64(std::uint64_t& state);

/// splitmix64 finalizer; full-avalanche bit mix.
std::uint64_t mix64(std::uint64_t z);

/// Stable 64-bit FNV-1a, used for corpus split assignment and stream tags.
std::uint64_t hash_str(std::string_view s);

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag_a, std::uint64_t tag_b);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t step);

/// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0,1) with full 53-bit mantissa.
    double uniform();

    /// Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal();

    /// Normal clipped by rejection to |z| <= 2 (truncated-normal init).
    double normal_trunc2();

    /// First k entries of a Fisher-Yates pass over 0..n-1 (k <= n).
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t s_[4];
};

}  // namespace teachlab
