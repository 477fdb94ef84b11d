#include "teachlab/rng.hpp"

#include <cmath>
#include <numbers>

#include "teachlab/errors.hpp"

namespace teachlab {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) {
    std::uint64_t st = root ^ (tag * 0x9e3779b97f4a7c15ULL);
    std::uint64_t a = splitmix64(st);
    return splitmix64(st) ^ a;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag_a, std::uint64_t tag_b) {
    return derive_seed(derive_seed(root, tag_a), tag_b);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
    return derive_seed(root, hash_str(tag));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t step) {
    return derive_seed(derive_seed(root, hash_str(tag)), step);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}
}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t st = seed;
    for (auto& w : s_) {
        w = splitmix64(st);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw ContractError("Rng::below: n must be > 0");
    }
    // rejection sampling on a power-of-two mask
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        const std::uint64_t v = next_u64() & mask;
        if (v < n) {
            return v;
        }
    }
}

double Rng::normal() {
    // Box-Muller, cosine branch only: draw count per call is fixed.
    const double u1 = 1.0 - uniform();  // (0,1], avoids log(0)
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal_trunc2() {
    for (;;) {
        const double z = normal();
        if (z >= -2.0 && z <= 2.0) {
            return z;
        }
    }
}

std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n, std::uint32_t k) {
    if (k > n) {
        throw ContractError("sample_without_replacement: k > n");
    }
    std::vector<std::uint32_t> pool(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::uint32_t j = i + static_cast<std::uint32_t>(below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace teachlab
