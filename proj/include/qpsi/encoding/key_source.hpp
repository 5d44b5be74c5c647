#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qpsi/core/measurement.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/register.hpp"
#include "qpsi/core/statevector.hpp"

namespace qpsi::encoding {

// Where the users' shared classical keys (multiplier k and binary mask kb)
// come from. IdealOracle hands both parties identical seeded randomness;
// SimulatedQkd derives the same values from a simulated prepare-and-measure
// key exchange run qubit by qubit. The third party never holds a KeySource.
enum class KeySourceKind { IdealOracle, SimulatedQkd };

struct KeySource {
    KeySourceKind kind = KeySourceKind::IdealOracle;
    std::uint64_t seed = 0;
};

// Bit string kb of length q steering the state-preparation convention.
struct BinaryMask {
    std::vector<int> bits;
};

namespace detail {

// Honest prepare-and-measure exchange: the sender encodes a random bit in a
// random basis, the receiver measures in a random basis, and rounds where
// the bases match contribute one shared bit (~half of them).
inline std::vector<int> qkd_shared_bits(std::size_t count,
                                        core::RandomStream& rng) {
    std::vector<int> bits;
    bits.reserve(count);
    while (bits.size() < count) {
        const int bit = rng.bit() ? 1 : 0;
        const auto send_basis = rng.bit() ? core::MeasurementBasis::X
                                          : core::MeasurementBasis::Z;
        core::StateVector qubit = core::StateVector::basis(1, bit);
        if (send_basis == core::MeasurementBasis::X) {
            qubit = core::apply_gate(qubit, core::Gate::h(0));
        }
        const auto recv_basis = rng.bit() ? core::MeasurementBasis::X
                                          : core::MeasurementBasis::Z;
        auto result = core::measure(qubit, {0}, recv_basis, rng);
        if (recv_basis == send_basis) bits.push_back(result.bits[0]);
    }
    return bits;
}

// Draws uniform values in [0, q) from a bit supplier until one is a unit.
class BitDrawer {
public:
    explicit BitDrawer(const KeySource& source)
        : rng_(core::RandomStream(source.seed).fork("shared-keys")),
          simulated_(source.kind == KeySourceKind::SimulatedQkd) {}

    int next_bit() {
        if (!simulated_) return rng_.bit() ? 1 : 0;
        if (cursor_ == pool_.size()) {
            auto more = qkd_shared_bits(64, rng_);
            pool_.insert(pool_.end(), more.begin(), more.end());
        }
        return pool_[cursor_++];
    }

    std::uint64_t next_below(std::uint64_t bound) {
        std::size_t width = 0;
        while ((std::uint64_t{1} << width) < bound) ++width;
        for (;;) {
            std::uint64_t value = 0;
            for (std::size_t i = 0; i < width; ++i) {
                value = (value << 1) | static_cast<std::uint64_t>(next_bit());
            }
            if (value < bound) return value;
        }
    }

private:
    core::RandomStream rng_;
    bool simulated_;
    std::vector<int> pool_;
    std::size_t cursor_ = 0;
};

}  // namespace detail

// Uniform multiplier over the units of Z_q, identical for every party
// reading the same source. gcd(k, q) = 1 always holds for the result.
inline std::uint64_t draw_multiplier(const KeySource& source, std::size_t q) {
    if (q < 2) throw std::invalid_argument("modulus must be at least 2");
    detail::BitDrawer drawer(source);
    for (;;) {
        const std::uint64_t k = drawer.next_below(q);
        if (std::gcd(k, static_cast<std::uint64_t>(q)) == 1) return k;
    }
}

// Uniform bit string of length q, identical for every party reading the
// same source, and independent of the multiplier draw.
inline BinaryMask draw_binary_mask(const KeySource& source, std::size_t q) {
    if (q < 2) throw std::invalid_argument("modulus must be at least 2");
    core::RandomStream rng = core::RandomStream(source.seed).fork("mask-bits");
    BinaryMask mask;
    mask.bits.reserve(q);
    if (source.kind == KeySourceKind::SimulatedQkd) {
        mask.bits = detail::qkd_shared_bits(q, rng);
    } else {
        for (std::size_t j = 0; j < q; ++j) {
            mask.bits.push_back(rng.bit() ? 1 : 0);
        }
    }
    return mask;
}

}  // namespace qpsi::encoding
