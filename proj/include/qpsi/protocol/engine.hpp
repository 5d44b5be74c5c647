#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpsi/channel/transport.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/register.hpp"
#include "qpsi/core/statevector.hpp"
#include "qpsi/encoding/item_states.hpp"
#include "qpsi/encoding/key_source.hpp"
#include "qpsi/encoding/sets.hpp"
#include "qpsi/protocol/types.hpp"
#include "qpsi/qotp/pauli.hpp"
#include "qpsi/qss/errors.hpp"
#include "qpsi/qss/keygen.hpp"

namespace qpsi::protocol {

// Joins the two encrypted pairs into one register and applies the
// transversal CNOTs: first wire of the control pair onto first wire of the
// target pair, second onto second. Returns the joined root register.
inline core::RegisterPtr evaluate_cnot_pair(const core::QubitRef& control0,
                                            const core::QubitRef& control1,
                                            const core::QubitRef& target0,
                                            const core::QubitRef& target1) {
    core::RegisterPtr root =
        core::join(core::resolve(control0).reg, core::resolve(target0).reg);
    root = core::join(root, core::resolve(control1).reg);
    root = core::join(root, core::resolve(target1).reg);
    core::apply_cnot(control0, target0);
    core::apply_cnot(control1, target1);
    return root;
}

// Pairwise grouping of m data owners (0-based indices). Even m gives
// disjoint pairs; odd m chains the tail so the last owner pairs with its
// predecessor and every owner is covered by ceil(m/2) groups.
inline std::vector<std::pair<std::size_t, std::size_t>> make_groups(
    std::size_t m) {
    if (m < 2) {
        throw std::invalid_argument("at least two data owners required");
    }
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    const std::size_t count = (m + 1) / 2;
    groups.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t first = 2 * i;
        std::size_t second = 2 * i + 1;
        if (second >= m) {
            first = m - 2;
            second = m - 1;
        }
        groups.emplace_back(first, second);
    }
    return groups;
}

namespace detail {

// The shared masking key k: either pinned by the config (still required to
// be a unit) or drawn from the common key source seeded off the run stream.
inline std::uint64_t choose_multiplier(const RunConfig& config, std::size_t q,
                                       const core::RandomStream& rng) {
    if (config.forced_multiplier) {
        const std::uint64_t k = *config.forced_multiplier;
        if (std::gcd(k, static_cast<std::uint64_t>(q)) != 1) {
            throw encoding::NonInvertibleMultiplier(k, q);
        }
        return k;
    }
    core::RandomStream source_rng = rng.fork("multiplier-source");
    encoding::KeySource source{config.key_source, source_rng.next_u64()};
    return encoding::draw_multiplier(source, q);
}

inline void check_payload_decoys(const char* name,
                                 const channel::ChannelReport& report,
                                 double threshold) {
    if (report.decoys_tested == 0) return;  // nothing to evaluate
    if (report.error_rate() > threshold) {
        throw qss::AbortEavesdropping(name, report);
    }
}

// One register per index pair, encrypted with X pads taken two bits per
// index from the owner's key. The key delivers 4q bits; the pads consume
// the first 2q and the remainder stays in reserve.
inline std::vector<core::QubitRef> encrypt_items(
    const std::vector<core::StateVector>& items,
    const std::vector<int>& pad_bits) {
    if (pad_bits.size() < 2 * items.size()) {
        throw std::invalid_argument("pad key shorter than the payload");
    }
    std::vector<core::QubitRef> refs;
    refs.reserve(2 * items.size());
    for (std::size_t j = 0; j < items.size(); ++j) {
        core::StateVector enc = qotp::encrypt(
            items[j],
            {qotp::PauliKey{pad_bits[2 * j], 0},
             qotp::PauliKey{pad_bits[2 * j + 1], 0}},
            {0, 1});
        core::RegisterPtr reg = core::make_register(std::move(enc));
        refs.push_back(core::QubitRef{reg, 0});
        refs.push_back(core::QubitRef{reg, 1});
    }
    return refs;
}

// One pairwise comparison end to end: key generation (with enlarged-surplus
// retries on key-bit shortfall), privacy encoding, pad encryption,
// decoy-protected transmission, homomorphic evaluation, decryption, and
// classification. All randomness is drawn from forks of `group_stream`, so
// groups may run in any order or concurrently with identical results.
inline GroupReport run_group(std::size_t group_index, std::size_t first_party,
                             std::size_t second_party,
                             const encoding::PrivateSet& set_first,
                             const encoding::PrivateSet& set_second,
                             std::uint64_t multiplier, const RunConfig& config,
                             const core::RandomStream& group_stream,
                             Transcript& transcript,
                             ResourceCounters& resources) {
    const std::size_t q = set_first.q;
    GroupReport group;
    group.group_index = group_index;
    group.first_party = first_party;
    group.second_party = second_party;

    const std::string first_id = "A" + std::to_string(first_party + 1);
    const std::string second_id = "A" + std::to_string(second_party + 1);

    // Shared binary mask for this group.
    if (config.forced_binary_mask) {
        if (config.forced_binary_mask->size() != q) {
            throw std::invalid_argument(
                "forced binary mask length must equal the modulus");
        }
        group.binary_mask.bits = *config.forced_binary_mask;
    } else {
        core::RandomStream mask_rng = group_stream.fork("mask-source");
        encoding::KeySource mask_source{config.key_source, mask_rng.next_u64()};
        group.binary_mask = encoding::draw_binary_mask(mask_source, q);
    }

    // Key generation, retried with a doubled surplus when too few usable
    // rounds survive basis sifting and testing.
    qss::KeygenConfig keygen_config = qss::KeygenConfig::defaults(q);
    if (config.delta) keygen_config.delta = *config.delta;
    keygen_config.test_fraction = config.test_fraction;
    keygen_config.error_threshold = config.error_threshold;

    qss::KeygenResult keygen;
    for (std::size_t attempt = 1;; ++attempt) {
        channel::Channel to_first(config.adversary, config.decoys_per_message);
        channel::Channel to_second(config.adversary,
                                   config.decoys_per_message);
        core::RandomStream attempt_rng =
            group_stream.fork("keygen-attempt-" + std::to_string(attempt));
        try {
            keygen = qss::run_keygen(keygen_config, to_first, to_second,
                                     attempt_rng);
            group.keygen_attempts = attempt;
            resources.messages_sent += 2;
            resources.qubits_prepared_total +=
                3 * keygen_config.total_rounds() +
                keygen.report.channel_to_alice.decoys_tested +
                keygen.report.channel_to_bob.decoys_tested;
            transcript.push_back({"key-generation", "TP", first_id,
                                  group_index, keygen_config.total_rounds(), 0,
                                  "entangled wire sequence"});
            transcript.push_back({"key-generation", "TP", second_id,
                                  group_index, keygen_config.total_rounds(), 0,
                                  "entangled wire sequence"});
            break;
        } catch (const qss::InsufficientKeyBits&) {
            resources.messages_sent += 2;
            resources.qubits_prepared_total +=
                3 * keygen_config.total_rounds();
            for (const auto& report : to_first.reports()) {
                resources.qubits_prepared_total += report.decoys_tested;
            }
            for (const auto& report : to_second.reports()) {
                resources.qubits_prepared_total += report.decoys_tested;
            }
            if (attempt >= config.max_keygen_attempts) throw;
            keygen_config.delta = 2 * keygen_config.delta + 64;
        }
    }
    resources.qubits_prepared_core += 3 * keygen_config.key_bits_needed();
    group.keygen = keygen.report;

    // Privacy encoding under the shared multiplier and this group's mask.
    encoding::MaskedSet masked_first = encoding::mask_set(set_first,
                                                          multiplier);
    encoding::MaskedSet masked_second = encoding::mask_set(set_second,
                                                           multiplier);

    group.first_owner = PartyState{Role::DataOwner, first_id,
                                   KeyView{keygen.keys.user_a_view(), {}},
                                   masked_first};
    group.second_owner = PartyState{Role::DataOwner, second_id,
                                    KeyView{keygen.keys.user_b_view(), {}},
                                    masked_second};
    group.third_party = PartyState{Role::ThirdParty, "TP",
                                   KeyView{{}, keygen.keys.tp_view()},
                                   std::nullopt};

    const auto items_first = encoding::prepare_item_states(
        masked_first, group.binary_mask, encoding::Side::A);
    const auto items_second = encoding::prepare_item_states(
        masked_second, group.binary_mask, encoding::Side::B);

    core::RandomStream eval_rng = group_stream.fork("evaluation");

    // Encrypted payloads travel to the evaluator through decoy-protected
    // channels, one message per owner.
    channel::Channel from_first(config.adversary, config.decoys_per_message);
    auto delivery_first = from_first.send(
        encrypt_items(items_first, keygen.keys.user_a_view()), eval_rng);
    group.payload_from_first = delivery_first.report;
    resources.messages_sent += 1;
    resources.qubits_prepared_core += 2 * q;
    resources.qubits_prepared_total +=
        2 * q + delivery_first.report.decoys_tested;
    check_payload_decoys("alice->tp", delivery_first.report,
                         config.error_threshold);
    transcript.push_back({"payload", first_id, "TP", group_index, 2 * q, 0,
                          "encrypted item pairs"});

    channel::Channel from_second(config.adversary, config.decoys_per_message);
    auto delivery_second = from_second.send(
        encrypt_items(items_second, keygen.keys.user_b_view()), eval_rng);
    group.payload_from_second = delivery_second.report;
    resources.messages_sent += 1;
    resources.qubits_prepared_core += 2 * q;
    resources.qubits_prepared_total +=
        2 * q + delivery_second.report.decoys_tested;
    check_payload_decoys("bob->tp", delivery_second.report,
                         config.error_threshold);
    transcript.push_back({"payload", second_id, "TP", group_index, 2 * q, 0,
                          "encrypted item pairs"});

    // Homomorphic evaluation: per index, transversal CNOTs, then the
    // evaluator decrypts the target pair with the XOR-relation bits and
    // measures. Outcomes are probability-1; the engine cross-checks each
    // one against the plaintext XOR as an internal soundness assertion.
    group.codes.reserve(q);
    const std::vector<int>& xor_bits = keygen.keys.tp_view();
    for (std::size_t j = 0; j < q; ++j) {
        const core::QubitRef a0 = delivery_first.payload[2 * j];
        const core::QubitRef a1 = delivery_first.payload[2 * j + 1];
        const core::QubitRef b0 = delivery_second.payload[2 * j];
        const core::QubitRef b1 = delivery_second.payload[2 * j + 1];
        evaluate_cnot_pair(a0, a1, b0, b1);

        const qotp::KeyPair2 sk = qotp::derive_tp_decryption_key(
            xor_bits[2 * j], xor_bits[2 * j + 1]);
        if (sk.alpha) core::apply(b0, core::GateKind::X);
        if (sk.beta) core::apply(b1, core::GateKind::X);

        const int bit0 =
            core::measure_qubit(b0, core::MeasurementBasis::Z, eval_rng);
        const int bit1 =
            core::measure_qubit(b1, core::MeasurementBasis::Z, eval_rng);
        const std::uint64_t outcome =
            (static_cast<std::uint64_t>(bit0) << 1) |
            static_cast<std::uint64_t>(bit1);

        const std::uint64_t expected =
            encoding::item_state_label(encoding::Side::A,
                                       group.binary_mask.bits[j],
                                       masked_first.contains(j)) ^
            encoding::item_state_label(encoding::Side::B,
                                       group.binary_mask.bits[j],
                                       masked_second.contains(j));
        if (outcome != expected) {
            throw std::logic_error(
                "index " + std::to_string(j) +
                " decrypted to a value different from the plaintext XOR");
        }
        group.codes.push_back(classify_outcome(outcome));
    }
    transcript.push_back({"evaluation", "TP", "TP", group_index, 0, 0,
                          "transversal cnot, decrypt, measure"});

    for (MembershipCode code : group.codes) {
        switch (code) {
            case MembershipCode::Both: group.counts.h1 += 1; break;
            case MembershipCode::BOnly: group.counts.h2 += 1; break;
            case MembershipCode::AOnly: group.counts.h3 += 1; break;
            case MembershipCode::Neither: group.counts.h4 += 1; break;
        }
    }
    group.counts.h1p = group.counts.h1;
    group.counts.h2p = group.counts.h1 + group.counts.h2 + group.counts.h3;
    return group;
}

inline void announce_result(ProtocolResult& result) {
    result.resources.classical_bits_output = 2;
    result.transcript.push_back({"announcement", "TP", "all", 0, 0, 2,
                                 "intersection and union cardinalities"});
}

}  // namespace detail

// The full two-party run. The result carries the cardinalities, all
// reports, and the resource tallies; security aborts and configuration
// errors surface as exceptions. Only forks of `rng` are consumed, so the
// result is a pure function of (sets, config, stream seed): rerunning with
// an equal stream reproduces the run bit for bit, and independent runs need
// distinct streams.
inline ProtocolResult run_two_party(const encoding::PrivateSet& set_a,
                                    const encoding::PrivateSet& set_b,
                                    const RunConfig& config,
                                    const core::RandomStream& rng) {
    if (set_a.q != set_b.q) {
        throw std::invalid_argument("sets must share a common modulus");
    }
    ProtocolResult result;
    result.multiplier = detail::choose_multiplier(config, set_a.q, rng);
    core::RandomStream group_stream = rng.fork("group-0");
    result.groups.push_back(detail::run_group(
        0, 0, 1, set_a, set_b, result.multiplier, config, group_stream,
        result.transcript, result.resources));

    result.counts = result.groups.front().counts;
    result.intersection_cardinality = result.counts.h1;
    result.union_cardinality =
        result.counts.h1 + result.counts.h2 + result.counts.h3;
    detail::announce_result(result);
    return result;
}

// The m-party extension: pairwise groups per make_groups, one comparison
// per group under a common multiplier and per-group binary masks, then
// index-wise aggregation. An index counts toward the intersection when
// every group reported Both there, and toward the union when any group
// reported a code other than Neither.
inline ProtocolResult run_multi_party(
    const std::vector<encoding::PrivateSet>& sets, const RunConfig& config,
    const core::RandomStream& rng) {
    if (sets.size() < 2) {
        throw std::invalid_argument("at least two data owners required");
    }
    const std::size_t q = sets.front().q;
    for (const encoding::PrivateSet& s : sets) {
        if (s.q != q) {
            throw std::invalid_argument("sets must share a common modulus");
        }
    }

    ProtocolResult result;
    result.multiplier = detail::choose_multiplier(config, q, rng);
    const auto groups = make_groups(sets.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        core::RandomStream group_stream =
            rng.fork("group-" + std::to_string(i));
        result.groups.push_back(detail::run_group(
            i, groups[i].first, groups[i].second, sets[groups[i].first],
            sets[groups[i].second], result.multiplier, config, group_stream,
            result.transcript, result.resources));
    }

    for (std::size_t j = 0; j < q; ++j) {
        bool all_both = true;
        bool any_held = false;
        for (const GroupReport& group : result.groups) {
            if (group.codes[j] != MembershipCode::Both) all_both = false;
            if (group.codes[j] != MembershipCode::Neither) any_held = true;
        }
        if (all_both) result.counts.h1p += 1;
        if (any_held) result.counts.h2p += 1;
    }
    if (sets.size() == 2) {
        // A single group: its two-party tallies are the run's tallies.
        const OutcomeCounts& g = result.groups.front().counts;
        result.counts.h1 = g.h1;
        result.counts.h2 = g.h2;
        result.counts.h3 = g.h3;
        result.counts.h4 = g.h4;
    }
    result.intersection_cardinality = result.counts.h1p;
    result.union_cardinality = result.counts.h2p;
    detail::announce_result(result);
    return result;
}

}  // namespace qpsi::protocol
