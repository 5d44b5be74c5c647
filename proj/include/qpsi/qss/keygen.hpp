#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpsi/channel/transport.hpp"
#include "qpsi/core/gates.hpp"
#include "qpsi/core/measurement.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/register.hpp"
#include "qpsi/core/statevector.hpp"
#include "qpsi/qss/errors.hpp"

namespace qpsi::qss {

// Configuration of one key-generation session producing 4q key bits per
// user from 4q + delta rounds.
struct KeygenConfig {
    std::size_t q = 1;              // modulus / key-group count
    std::size_t delta = 0;          // surplus rounds beyond 4q
    double test_fraction = 0.125;   // share of rounds spent on honesty tests
    double error_threshold = 0.0;   // strictly-greater rates abort
    // Dishonest-TP hook: a 3-qubit state distributed instead of the honest
    // resource state.
    std::optional<core::StateVector> substituted_state;

    // With uniform basis choices only ~1/4 of rounds land in the Z-Z key
    // case, so the surplus must be a multiple of q; this default makes an
    // under-supply of key bits a rare event rather than an expected one.
    static KeygenConfig defaults(std::size_t q) {
        KeygenConfig config;
        config.q = q;
        config.delta = 12 * q + 64;
        return config;
    }

    std::size_t total_rounds() const { return 4 * q + delta; }
    std::size_t key_bits_needed() const { return 4 * q; }
    std::size_t num_test_rounds() const {
        return static_cast<std::size_t>(
            std::ceil(test_fraction * static_cast<double>(total_rounds())));
    }

    void validate() const {
        if (q == 0) throw std::invalid_argument("q must be positive");
        if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
            throw std::invalid_argument("test_fraction must be in (0,1)");
        }
        if (!(error_threshold >= 0.0) || !(error_threshold < 1.0)) {
            throw std::invalid_argument("error_threshold must be in [0,1)");
        }
        if (substituted_state && substituted_state->num_qubits() != 3) {
            throw std::invalid_argument(
                "substituted state must have 3 qubits");
        }
    }
};

// The resource state (|000> + |011> + |101> + |110>)/2: a uniform
// superposition of all even-parity labels, i.e. sum over a,b of
// |a, b, a^b>/2. Circuit: H(0), H(1), CNOT(0->2), CNOT(1->2).
inline core::StateVector prepare_psi() {
    core::StateVector s(3);
    s = core::apply_gate(s, core::Gate::h(0));
    s = core::apply_gate(s, core::Gate::h(1));
    s = core::apply_gate(s, core::Gate::cnot(0, 2));
    s = core::apply_gate(s, core::Gate::cnot(1, 2));
    return s;
}

struct KeygenRound {
    std::size_t round_id = 0;
    core::MeasurementBasis tp_basis = core::MeasurementBasis::Z;  // always Z
    core::MeasurementBasis alice_basis = core::MeasurementBasis::Z;
    core::MeasurementBasis bob_basis = core::MeasurementBasis::Z;
    std::optional<int> tp_outcome;
    std::optional<int> alice_outcome;
    std::optional<int> bob_outcome;
    bool used_as_test = false;
};

// The correlation table for same-basis rounds: Z-Z outcomes satisfy
// alice ^ bob = tp; X-X outcomes satisfy alice = bob (either tp result).
inline bool verify_table1(const KeygenRound& round) {
    if (round.alice_basis != round.bob_basis) {
        throw std::invalid_argument(
            "only same-basis rounds can be verified");
    }
    if (!round.tp_outcome || !round.alice_outcome || !round.bob_outcome) {
        throw std::invalid_argument("round not fully measured");
    }
    if (round.alice_basis == core::MeasurementBasis::Z) {
        return (*round.alice_outcome ^ *round.bob_outcome) ==
               *round.tp_outcome;
    }
    return *round.alice_outcome == *round.bob_outcome;
}

// Key bits as the three participants hold them. The relation
// r_t[i] = r_a[i] ^ r_b[i] holds on every honest run; the third party's
// legitimate view is tp_view() only.
struct SharedKeyMaterial {
    std::vector<int> r_a;
    std::vector<int> r_b;
    std::vector<int> r_t;

    const std::vector<int>& tp_view() const { return r_t; }
    const std::vector<int>& user_a_view() const { return r_a; }
    const std::vector<int>& user_b_view() const { return r_b; }

    bool xor_relation_holds() const {
        if (r_a.size() != r_b.size() || r_a.size() != r_t.size()) return false;
        for (std::size_t i = 0; i < r_a.size(); ++i) {
            if ((r_a[i] ^ r_b[i]) != r_t[i]) return false;
        }
        return true;
    }
};

struct KeygenReport {
    std::size_t q = 0;
    std::size_t delta = 0;
    std::size_t rounds_total = 0;
    channel::ChannelReport channel_to_alice;
    channel::ChannelReport channel_to_bob;
    std::size_t test_rounds = 0;
    std::size_t same_basis_test_rounds = 0;
    std::size_t table1_violations = 0;
    std::size_t zz_key_rounds = 0;  // usable key rounds before truncation
    std::size_t key_bits = 0;       // extracted per participant
    // Z-outcome tallies for marginal-uniformity statistics.
    std::size_t tp_z_ones = 0;
    std::size_t alice_z_rounds = 0;
    std::size_t alice_z_ones = 0;
    std::size_t bob_z_rounds = 0;
    std::size_t bob_z_ones = 0;
};

struct KeygenResult {
    SharedKeyMaterial keys;
    KeygenReport report;
    std::vector<KeygenRound> rounds;  // full transcript, for analysis
};

namespace detail {
inline void check_decoy_report(const char* name,
                               const channel::ChannelReport& report,
                               double threshold) {
    if (report.decoys_tested == 0) {
        throw std::invalid_argument(
            "channel must test at least one decoy per message");
    }
    if (report.error_rate() > threshold) {
        throw AbortEavesdropping(name, report);
    }
}
}  // namespace detail

// Executes one full key-generation session: resource-state distribution
// through decoy-protected channels, per-round measurements, random-subset
// correlation tests, and key extraction from untested Z-Z rounds.
inline KeygenResult run_keygen(const KeygenConfig& config,
                               channel::Channel& to_alice,
                               channel::Channel& to_bob,
                               core::RandomStream& rng) {
    config.validate();
    const std::size_t n = config.total_rounds();

    KeygenResult result;
    result.report.q = config.q;
    result.report.delta = config.delta;
    result.report.rounds_total = n;

    // Distribution: the dealer keeps wire 0 of each copy and sends wires 1
    // and 2 through the two channels as whole sequences.
    const core::StateVector resource =
        config.substituted_state ? *config.substituted_state : prepare_psi();
    std::vector<core::RegisterPtr> copies;
    copies.reserve(n);
    std::vector<core::QubitRef> to_alice_qubits;
    std::vector<core::QubitRef> to_bob_qubits;
    to_alice_qubits.reserve(n);
    to_bob_qubits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        copies.push_back(core::make_register(resource));
        to_alice_qubits.push_back(core::QubitRef{copies.back(), 1});
        to_bob_qubits.push_back(core::QubitRef{copies.back(), 2});
    }

    auto alice_delivery = to_alice.send(std::move(to_alice_qubits), rng);
    result.report.channel_to_alice = alice_delivery.report;
    detail::check_decoy_report("tp->alice", alice_delivery.report,
                               config.error_threshold);

    auto bob_delivery = to_bob.send(std::move(to_bob_qubits), rng);
    result.report.channel_to_bob = bob_delivery.report;
    detail::check_decoy_report("tp->bob", bob_delivery.report,
                               config.error_threshold);

    // Measurement: dealer always in Z, users in independent uniform bases.
    result.rounds.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        KeygenRound round;
        round.round_id = i;
        round.alice_basis = rng.bit() ? core::MeasurementBasis::X
                                      : core::MeasurementBasis::Z;
        round.bob_basis = rng.bit() ? core::MeasurementBasis::X
                                    : core::MeasurementBasis::Z;
        round.tp_outcome = core::measure_qubit(
            core::QubitRef{copies[i], 0}, core::MeasurementBasis::Z, rng);
        round.alice_outcome = core::measure_qubit(alice_delivery.payload[i],
                                                  round.alice_basis, rng);
        round.bob_outcome = core::measure_qubit(bob_delivery.payload[i],
                                                round.bob_basis, rng);

        result.report.tp_z_ones +=
            static_cast<std::size_t>(*round.tp_outcome);
        if (round.alice_basis == core::MeasurementBasis::Z) {
            result.report.alice_z_rounds += 1;
            result.report.alice_z_ones +=
                static_cast<std::size_t>(*round.alice_outcome);
        }
        if (round.bob_basis == core::MeasurementBasis::Z) {
            result.report.bob_z_rounds += 1;
            result.report.bob_z_ones +=
                static_cast<std::size_t>(*round.bob_outcome);
        }
        result.rounds.push_back(round);
    }

    // Random test subset; only same-basis members are verifiable.
    const std::size_t num_test = config.num_test_rounds();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < num_test && i < n; ++i) {
        const std::size_t j = i + rng.integer(n - i);
        std::swap(order[i], order[j]);
    }
    for (std::size_t i = 0; i < num_test && i < n; ++i) {
        result.rounds[order[i]].used_as_test = true;
    }
    result.report.test_rounds = num_test < n ? num_test : n;

    for (const KeygenRound& round : result.rounds) {
        if (!round.used_as_test) continue;
        if (round.alice_basis != round.bob_basis) continue;
        result.report.same_basis_test_rounds += 1;
        if (!verify_table1(round)) result.report.table1_violations += 1;
    }
    // With no same-basis test round there is no verifiable evidence either
    // way; the check is skipped (vanishingly rare at sane test fractions).
    if (result.report.same_basis_test_rounds > 0) {
        const double violation_rate =
            static_cast<double>(result.report.table1_violations) /
            static_cast<double>(result.report.same_basis_test_rounds);
        if (violation_rate > config.error_threshold) {
            throw AbortDishonestTP(result.report.table1_violations,
                                   result.report.same_basis_test_rounds);
        }
    }

    // Key extraction from untested rounds where both users chose Z.
    const std::size_t needed = config.key_bits_needed();
    for (const KeygenRound& round : result.rounds) {
        if (round.used_as_test) continue;
        if (round.alice_basis != core::MeasurementBasis::Z ||
            round.bob_basis != core::MeasurementBasis::Z) {
            continue;
        }
        result.report.zz_key_rounds += 1;
        if (result.keys.r_a.size() < needed) {
            result.keys.r_a.push_back(*round.alice_outcome);
            result.keys.r_b.push_back(*round.bob_outcome);
            result.keys.r_t.push_back(*round.tp_outcome);
        }
    }
    if (result.keys.r_a.size() < needed) {
        throw InsufficientKeyBits(result.report.zz_key_rounds, needed);
    }
    result.report.key_bits = needed;
    return result;
}

// Exact per-round statistics of the honesty test against an arbitrary
// substituted 3-qubit state, and the resulting rejection probability at
// error threshold 0 (any observed violation aborts). Probabilities are
// enumerated from the state, not sampled.
struct SubstitutionAnalysis {
    double violation_zz = 0.0;  // P(parity check fails | both users chose Z)
    double violation_xx = 0.0;  // P(equality check fails | both chose X)
    double per_test_round_violation = 0.0;
    double rejection_probability = 0.0;
};

inline SubstitutionAnalysis analyze_substitution(
    const core::StateVector& state, const KeygenConfig& config) {
    if (state.num_qubits() != 3) {
        throw std::invalid_argument("substituted state must have 3 qubits");
    }
    SubstitutionAnalysis analysis;

    auto dist_z = core::measurement_distribution(state, {0, 1, 2},
                                                 core::MeasurementBasis::Z);
    for (const auto& [label, p] : dist_z) {
        const int tp = static_cast<int>((label >> 2) & 1);
        const int alice = static_cast<int>((label >> 1) & 1);
        const int bob = static_cast<int>(label & 1);
        if ((alice ^ bob) != tp) analysis.violation_zz += p;
    }

    auto dist_x = core::measurement_distribution(state, {1, 2},
                                                 core::MeasurementBasis::X);
    for (const auto& [label, p] : dist_x) {
        const int alice = static_cast<int>((label >> 1) & 1);
        const int bob = static_cast<int>(label & 1);
        if (alice != bob) analysis.violation_xx += p;
    }

    // A test round catches a violation only when both users happened to
    // choose the same basis: probability 1/4 for each same-basis case.
    analysis.per_test_round_violation =
        0.25 * analysis.violation_zz + 0.25 * analysis.violation_xx;
    analysis.rejection_probability =
        1.0 - std::pow(1.0 - analysis.per_test_round_violation,
                       static_cast<double>(config.num_test_rounds()));
    return analysis;
}

}  // namespace qpsi::qss
