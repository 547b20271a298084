#pragma once

#include <cstdint>
#include <random>

namespace bahadur {

/// Deterministic stream of uniforms on the open interval (0, 1).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the
/// standard, so a seed reproduces the same doubles on every platform.
/// Every draw consumes exactly one engine value.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    double uniform() {
        // 53 random bits, shifted half a step off zero: never 0 or 1.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return engine_(); }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

// splitmix64 finalizer: a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace bahadur
