#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpsi/channel/decoy.hpp"
#include "qpsi/core/density.hpp"
#include "qpsi/core/measurement.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/register.hpp"
#include "qpsi/core/statevector.hpp"

namespace qpsi::channel {

// A quantum sequence in flight: payload qubits with decoys interleaved.
// The decoy specs ride along only so verify_decoys can consume them; an
// adversary acting on the message sees nothing but the qubit sequence.
struct QuantumMessage {
    std::vector<core::QubitRef> qubits;        // interleaved sequence
    std::vector<std::size_t> decoy_positions;  // announced at check time
    DecoyPlan specs;                           // sender-retained
};

// Interleaves freshly prepared decoy qubits into the payload per the plan.
// Payload qubits keep their relative order in the non-decoy slots.
inline QuantumMessage compose_message(std::vector<core::QubitRef> payload,
                                      const DecoyPlan& plan) {
    for (const DecoySpec& spec : plan) {
        if (spec.position >= payload.size() + plan.size()) {
            throw std::invalid_argument("decoy position out of range");
        }
    }
    QuantumMessage msg;
    msg.specs = plan;
    const std::size_t total = payload.size() + plan.size();
    msg.qubits.resize(total);
    std::vector<bool> is_decoy(total, false);
    for (const DecoySpec& spec : plan) {
        if (is_decoy[spec.position]) {
            throw std::invalid_argument("duplicate decoy position");
        }
        is_decoy[spec.position] = true;
        msg.qubits[spec.position] =
            core::QubitRef{core::make_register(decoy_state(spec.label)), 0};
        msg.decoy_positions.push_back(spec.position);
    }
    std::size_t next_payload = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (!is_decoy[i]) msg.qubits[i] = payload[next_payload++];
    }
    if (next_payload != payload.size()) {
        throw std::logic_error("payload slot mismatch");
    }
    return msg;
}

enum class AdversaryKind { None, InterceptResend, EntangleMeasure };

inline const char* adversary_name(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::None: return "none";
        case AdversaryKind::InterceptResend: return "intercept-resend";
        case AdversaryKind::EntangleMeasure: return "entangle-measure";
    }
    throw std::invalid_argument("bad adversary kind");
}

struct AdversaryStrategy {
    AdversaryKind kind = AdversaryKind::None;
    // EntangleMeasure truth table: the unitary acts as |x>|y> -> |x>|y^f(x)>.
    int f0 = 0;
    int f1 = 0;

    static AdversaryStrategy none() { return {}; }
    static AdversaryStrategy intercept_resend() {
        return {AdversaryKind::InterceptResend, 0, 0};
    }
    static AdversaryStrategy entangle_measure(int f0, int f1) {
        if ((f0 != 0 && f0 != 1) || (f1 != 0 && f1 != 1)) {
            throw std::invalid_argument("f truth table must be bits");
        }
        return {AdversaryKind::EntangleMeasure, f0, f1};
    }
};

// One adversary across one protocol run. Retains every ancilla it entangles
// so information-gain metrics can be evaluated after the run.
class AdversarySession {
public:
    explicit AdversarySession(AdversaryStrategy strategy)
        : strategy_(strategy) {}

    const AdversaryStrategy& strategy() const { return strategy_; }
    const std::vector<core::QubitRef>& ancillas() const { return ancillas_; }

    core::DensityMatrix ancilla_density(std::size_t i) const {
        return core::qubit_density(ancillas_.at(i));
    }

    void touch_qubit(const core::QubitRef& qubit, core::RandomStream& rng) {
        switch (strategy_.kind) {
            case AdversaryKind::None:
                return;
            case AdversaryKind::InterceptResend: {
                // Measure in a uniformly random basis; the collapsed state
                // is exactly the resent preparation.
                const auto basis = rng.bit() ? core::MeasurementBasis::X
                                             : core::MeasurementBasis::Z;
                core::measure_qubit(qubit, basis, rng);
                return;
            }
            case AdversaryKind::EntangleMeasure: {
                // Fresh |0> ancilla, then |x>|y> -> |x>|y^f(x)> with
                // f(x) = f0 ^ (f0^f1) x.
                core::QubitRef ancilla = core::append_wire(
                    qubit, core::StateVector::basis("0"));
                if (strategy_.f0) core::apply(ancilla, core::GateKind::X);
                if (strategy_.f0 != strategy_.f1) {
                    core::apply_cnot(qubit, ancilla);
                }
                ancillas_.push_back(ancilla);
                return;
            }
        }
        throw std::logic_error("bad adversary kind");
    }

private:
    AdversaryStrategy strategy_;
    std::vector<core::QubitRef> ancillas_;
};

// Sends a message through the channel watched by `adversary`. Honest
// transit (AdversaryKind::None) is exactly the identity: the same register
// references come out, amplitudes untouched.
inline QuantumMessage transmit(QuantumMessage msg, AdversarySession& adversary,
                               core::RandomStream& rng) {
    for (const core::QubitRef& qubit : msg.qubits) {
        adversary.touch_qubit(qubit, rng);
    }
    return msg;
}

struct ChannelReport {
    std::size_t decoys_tested = 0;
    std::size_t decoys_wrong = 0;

    // Fraction of tested decoys that failed. Checking an empty sample is an
    // error condition, not a pass.
    double error_rate() const {
        if (decoys_tested == 0) {
            throw std::logic_error("no decoys were tested");
        }
        return static_cast<double>(decoys_wrong) /
               static_cast<double>(decoys_tested);
    }
};

// Measures each decoy in its preparation basis, counts mismatches, removes
// the decoys, and compacts the payload back to its original order.
inline ChannelReport verify_decoys(QuantumMessage& msg, const DecoyPlan& plan,
                                   core::RandomStream& rng) {
    if (plan.size() != msg.decoy_positions.size()) {
        throw std::invalid_argument("decoy plan does not match message");
    }
    ChannelReport report;
    std::vector<bool> is_decoy(msg.qubits.size(), false);
    for (const DecoySpec& spec : plan) {
        if (spec.position >= msg.qubits.size() || is_decoy[spec.position]) {
            throw std::invalid_argument("decoy plan does not match message");
        }
        is_decoy[spec.position] = true;
        const int bit = core::measure_qubit(msg.qubits[spec.position],
                                            decoy_basis(spec.label), rng);
        report.decoys_tested += 1;
        if (bit != decoy_expected_bit(spec.label)) report.decoys_wrong += 1;
    }
    std::vector<core::QubitRef> payload;
    payload.reserve(msg.qubits.size() - plan.size());
    for (std::size_t i = 0; i < msg.qubits.size(); ++i) {
        if (!is_decoy[i]) payload.push_back(msg.qubits[i]);
    }
    msg.qubits = std::move(payload);
    msg.decoy_positions.clear();
    msg.specs.clear();
    return report;
}

// One directed quantum channel with a fixed adversary and decoy policy.
// Each send interleaves fresh decoys, routes everything past the adversary,
// and runs the receiver-side decoy check. Reports accumulate across sends;
// the adversary session persists so retained ancillas can be inspected
// after a run.
class Channel {
public:
    explicit Channel(AdversaryStrategy strategy,
                     std::optional<std::size_t> decoys_per_message =
                         std::nullopt)
        : session_(strategy), decoys_per_message_(decoys_per_message) {}

    struct Delivery {
        ChannelReport report;
        std::vector<core::QubitRef> payload;
    };

    Delivery send(std::vector<core::QubitRef> payload,
                  core::RandomStream& rng) {
        const std::size_t num_decoys =
            decoys_per_message_ ? *decoys_per_message_ : payload.size();
        DecoyPlan plan = insert_decoys(payload.size(), num_decoys, rng);
        QuantumMessage msg = compose_message(std::move(payload), plan);
        msg = transmit(std::move(msg), session_, rng);
        ChannelReport report = verify_decoys(msg, plan, rng);
        reports_.push_back(report);
        return Delivery{report, std::move(msg.qubits)};
    }

    AdversarySession& session() { return session_; }
    const AdversarySession& session() const { return session_; }
    const std::vector<ChannelReport>& reports() const { return reports_; }

private:
    AdversarySession session_;
    std::optional<std::size_t> decoys_per_message_;
    std::vector<ChannelReport> reports_;
};

}  // namespace qpsi::channel
