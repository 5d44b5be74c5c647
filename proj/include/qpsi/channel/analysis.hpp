#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "qpsi/channel/decoy.hpp"
#include "qpsi/channel/transport.hpp"
#include "qpsi/core/density.hpp"
#include "qpsi/core/gates.hpp"
#include "qpsi/core/measurement.hpp"
#include "qpsi/core/statevector.hpp"

// Exact detection probabilities and information-gain metrics for the two
// adversary strategies, computed by enumerating the measurement trees rather
// than by sampling. These sit alongside the sampled estimates from actual
// channel runs.

namespace qpsi::channel {

inline constexpr std::array<DecoyLabel, 4> kAllDecoyLabels = {
    DecoyLabel::Zero, DecoyLabel::One, DecoyLabel::Plus, DecoyLabel::Minus};

namespace detail {
inline core::StateVector basis_eigenstate(core::MeasurementBasis basis,
                                          int bit) {
    core::StateVector s = core::StateVector::basis(1, bit ? 1 : 0);
    if (basis == core::MeasurementBasis::X) {
        s = core::apply_gate(s, core::Gate::h(0));
    }
    return s;
}

inline double pass_probability(const core::StateVector& qubit,
                               DecoyLabel label) {
    auto dist = core::measurement_distribution(qubit, {0}, decoy_basis(label));
    auto it = dist.find(static_cast<std::uint64_t>(decoy_expected_bit(label)));
    return it == dist.end() ? 0.0 : it->second;
}
}  // namespace detail

// Probability an intercept-resend adversary (uniform random measuring basis)
// is caught by one decoy prepared as `label`: average over the adversary's
// basis choice and measurement outcomes of the chance the checking
// measurement disagrees with the preparation.
inline double intercept_resend_detection_probability(DecoyLabel label) {
    const core::StateVector prepared = decoy_state(label);
    double detect = 0.0;
    for (core::MeasurementBasis eve_basis :
         {core::MeasurementBasis::Z, core::MeasurementBasis::X}) {
        auto dist = core::measurement_distribution(prepared, {0}, eve_basis);
        for (const auto& [outcome, p] : dist) {
            const core::StateVector resent = detail::basis_eigenstate(
                eve_basis, static_cast<int>(outcome));
            detect += 0.5 * p * (1.0 - detail::pass_probability(resent, label));
        }
    }
    return detect;
}

inline double intercept_resend_detection_probability() {
    double total = 0.0;
    for (DecoyLabel label : kAllDecoyLabels) {
        total += intercept_resend_detection_probability(label);
    }
    return total / 4.0;
}

namespace detail {
// Joint (decoy, ancilla) state after the entangling unitary.
inline core::StateVector entangled_pair(DecoyLabel label, int f0, int f1) {
    core::StateVector joint =
        core::tensor(decoy_state(label), core::StateVector::basis("0"));
    if (f0) joint = core::apply_gate(joint, core::Gate::x(1));
    if (f0 != f1) joint = core::apply_gate(joint, core::Gate::cnot(0, 1));
    return joint;
}
}  // namespace detail

// Probability one decoy prepared as `label` catches an entangle-measure
// adversary with truth table (f0, f1).
inline double entangle_measure_detection_probability(DecoyLabel label, int f0,
                                                     int f1) {
    const core::StateVector joint = detail::entangled_pair(label, f0, f1);
    return 1.0 - detail::pass_probability(joint, label);
}

inline double entangle_measure_detection_probability(int f0, int f1) {
    double total = 0.0;
    for (DecoyLabel label : kAllDecoyLabels) {
        total += entangle_measure_detection_probability(label, f0, f1);
    }
    return total / 4.0;
}

// The adversary's ancilla state after entangling with one decoy, before any
// checking measurement.
inline core::DensityMatrix entangle_measure_ancilla_density(DecoyLabel label,
                                                            int f0, int f1) {
    return core::reduced_density(detail::entangled_pair(label, f0, f1), {1});
}

// Largest trace distance between ancilla states across the four decoy
// inputs: 0 means the ancilla carries no information about what was sent.
inline double entangle_measure_ancilla_max_distance(int f0, int f1) {
    double max_distance = 0.0;
    for (DecoyLabel a : kAllDecoyLabels) {
        for (DecoyLabel b : kAllDecoyLabels) {
            const double d = core::trace_distance_qubit(
                entangle_measure_ancilla_density(a, f0, f1),
                entangle_measure_ancilla_density(b, f0, f1));
            if (d > max_distance) max_distance = d;
        }
    }
    return max_distance;
}

}  // namespace qpsi::channel
