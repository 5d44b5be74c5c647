#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qpsi/core/statevector.hpp"
#include "qpsi/encoding/key_source.hpp"
#include "qpsi/encoding/sets.hpp"

namespace qpsi::encoding {

// Which user's preparation rule to apply. The two rules are deliberately
// asymmetric so that the bitwise XOR of the two basis labels at index j is
// (1-member_B, 1-member_A) no matter which mask bit was shared, while the
// mask bit re-randomizes the individual labels from run to run.
enum class Side { A, B };

// Two-bit basis label for index j under mask bit kb:
//   A-side: kb=0 -> |00>/|01> (non-member/member); kb=1 -> |11>/|10>.
//   B-side: kb=0 -> |11>/|01>;                     kb=1 -> |00>/|10>.
// Their XOR is (1-member_B, 1-member_A) for either mask bit.
inline std::uint64_t item_state_label(Side side, int mask_bit, bool member) {
    if (mask_bit != 0 && mask_bit != 1) {
        throw std::invalid_argument("mask bit must be 0 or 1");
    }
    if (side == Side::A) {
        if (mask_bit == 0) return member ? 0b01 : 0b00;
        return member ? 0b10 : 0b11;
    }
    if (mask_bit == 0) return member ? 0b01 : 0b11;
    return member ? 0b10 : 0b00;
}

// One 2-qubit computational state per index j = 0..q-1.
inline std::vector<core::StateVector> prepare_item_states(
    const MaskedSet& masked, const BinaryMask& mask, Side side) {
    if (mask.bits.size() != masked.q) {
        throw std::invalid_argument("mask length must equal the modulus");
    }
    std::vector<core::StateVector> states;
    states.reserve(masked.q);
    for (std::size_t j = 0; j < masked.q; ++j) {
        const std::uint64_t label =
            item_state_label(side, mask.bits[j], masked.contains(j));
        states.push_back(core::StateVector::basis(2, label));
    }
    return states;
}

}  // namespace qpsi::encoding
