#pragma once

#include <cstdint>
#include <string_view>

namespace maskbench {

// FNV-1a, used to fold string identifiers into seed material.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Seedable splitmix64 stream. The standard <random> distributions are
// implementation-defined, so every draw here is spelled out to keep
// outputs identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

private:
    std::uint64_t state_;
};

// Derives an independent child seed from a parent seed and a name, so that
// per-item streams never depend on processing order.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view name) {
    Rng mix(parent ^ fnv1a64(name));
    return mix.next_u64();
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t salt) {
    Rng mix(parent ^ (salt * 0x9e3779b97f4a7c15ull + 0x7f4a7c15ull));
    return mix.next_u64();
}

} // namespace maskbench
