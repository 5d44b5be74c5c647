#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace qpsi::core {

// Seedable random stream. Every sampling operation in the library takes one
// of these explicitly; there is no global RNG. A stream is confined to one
// logical thread of execution; independent work gets independent streams via
// fork(), which derives a child seed from the creation seed and a label, so
// forking is order-independent and repeatable.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), state_(mix(seed)) {
        if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
    }

    std::uint64_t seed() const { return seed_; }

    // xorshift* step; portable across platforms, unlike std distributions.
    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    bool bit() { return (next_u64() >> 63) != 0; }

    // Uniform in [0, 1) with 53 bits of precision.
    double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound); rejection sampling, no modulo bias.
    std::uint64_t integer(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("integer bound must be > 0");
        const std::uint64_t limit = bound * (~0ull / bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    RandomStream fork(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return RandomStream(mix(seed_ ^ h));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace qpsi::core
