#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpsi/core/gates.hpp"
#include "qpsi/core/measurement.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/statevector.hpp"

namespace qpsi::channel {

// The four decoy-photon states used for eavesdropping detection.
enum class DecoyLabel { Zero, One, Plus, Minus };

inline const char* decoy_name(DecoyLabel label) {
    switch (label) {
        case DecoyLabel::Zero: return "0";
        case DecoyLabel::One: return "1";
        case DecoyLabel::Plus: return "+";
        case DecoyLabel::Minus: return "-";
    }
    throw std::invalid_argument("bad decoy label");
}

inline core::StateVector decoy_state(DecoyLabel label) {
    switch (label) {
        case DecoyLabel::Zero:
            return core::StateVector::basis("0");
        case DecoyLabel::One:
            return core::StateVector::basis("1");
        case DecoyLabel::Plus:
            return core::apply_gate(core::StateVector::basis("0"),
                                    core::Gate::h(0));
        case DecoyLabel::Minus:
            return core::apply_gate(core::StateVector::basis("1"),
                                    core::Gate::h(0));
    }
    throw std::invalid_argument("bad decoy label");
}

// Basis the decoy was prepared in, which is also the checking basis.
inline core::MeasurementBasis decoy_basis(DecoyLabel label) {
    return (label == DecoyLabel::Zero || label == DecoyLabel::One)
               ? core::MeasurementBasis::Z
               : core::MeasurementBasis::X;
}

// Measurement bit the receiver must see if the decoy arrived untouched.
inline int decoy_expected_bit(DecoyLabel label) {
    return (label == DecoyLabel::One || label == DecoyLabel::Minus) ? 1 : 0;
}

struct DecoySpec {
    std::size_t position = 0;  // index in the interleaved sequence
    DecoyLabel label = DecoyLabel::Zero;
};

using DecoyPlan = std::vector<DecoySpec>;

// Draws decoy positions uniformly without replacement over the interleaved
// sequence of length payload_len + num_decoys, and labels uniformly over the
// four decoy states. The plan is the sender's private record; positions and
// bases are only announced at check time.
inline DecoyPlan insert_decoys(std::size_t payload_len, std::size_t num_decoys,
                               core::RandomStream& rng) {
    const std::size_t total = payload_len + num_decoys;
    std::vector<std::size_t> slots(total);
    for (std::size_t i = 0; i < total; ++i) slots[i] = i;
    // Partial Fisher-Yates: the first num_decoys entries become the sample.
    for (std::size_t i = 0; i < num_decoys; ++i) {
        const std::size_t j = i + rng.integer(total - i);
        std::swap(slots[i], slots[j]);
    }
    slots.resize(num_decoys);
    std::sort(slots.begin(), slots.end());

    DecoyPlan plan;
    plan.reserve(num_decoys);
    for (std::size_t pos : slots) {
        plan.push_back(DecoySpec{pos, static_cast<DecoyLabel>(rng.integer(4))});
    }
    return plan;
}

}  // namespace qpsi::channel
