#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsi/channel/transport.hpp"
#include "qpsi/encoding/key_source.hpp"
#include "qpsi/encoding/sets.hpp"
#include "qpsi/qss/keygen.hpp"

namespace qpsi::protocol {

// Joint-membership reading of one decrypted index: which data owner(s) in
// the pair hold the element behind index j.
enum class MembershipCode { Both, BOnly, AOnly, Neither };

inline const char* membership_name(MembershipCode code) {
    switch (code) {
        case MembershipCode::Both: return "both";
        case MembershipCode::BOnly: return "b-only";
        case MembershipCode::AOnly: return "a-only";
        case MembershipCode::Neither: return "neither";
    }
    throw std::invalid_argument("bad membership code");
}

// Decrypted two-bit outcome -> attribution. 00 means both owners hold the
// element, 01 only the second owner, 10 only the first, 11 neither.
inline MembershipCode classify_outcome(std::uint64_t bits) {
    switch (bits) {
        case 0b00: return MembershipCode::Both;
        case 0b01: return MembershipCode::BOnly;
        case 0b10: return MembershipCode::AOnly;
        case 0b11: return MembershipCode::Neither;
    }
    throw std::invalid_argument("outcome must be a two-bit value");
}

// Index tallies. h1..h4 count the four membership codes of one two-party
// comparison and always sum to q. h1p counts indices where every group
// reported Both; h2p counts indices where at least one group reported a
// code other than Neither. For a single group h1p = h1 and
// h2p = h1 + h2 + h3.
struct OutcomeCounts {
    std::size_t h1 = 0;  // Both
    std::size_t h2 = 0;  // BOnly
    std::size_t h3 = 0;  // AOnly
    std::size_t h4 = 0;  // Neither
    std::size_t h1p = 0;
    std::size_t h2p = 0;
};

// Quantum/classical resource tallies for one protocol run. The core counter
// covers only qubits that carry protocol information: three per consumed
// key round (12q per group) plus the 4q encrypted payload qubits per group.
// Decoys, surplus key rounds, and retried sessions land in the total.
struct ResourceCounters {
    std::size_t qubits_prepared_core = 0;
    std::size_t qubits_prepared_total = 0;
    std::size_t classical_bits_output = 0;
    std::size_t messages_sent = 0;
};

// One entry of the ordered event log: a quantum message, a local evaluation
// step, or a classical announcement.
struct TranscriptEvent {
    std::string phase;  // key-generation | payload | evaluation | announcement
    std::string sender;
    std::string receiver;
    std::size_t group = 0;
    std::size_t qubits = 0;
    std::size_t classical_values = 0;
    std::string note;
};

using Transcript = std::vector<TranscriptEvent>;

enum class Role { DataOwner, ThirdParty };

// Role-filtered key material. A data owner holds its own pad bits and
// nothing of the other owner's; the third party holds only the bitwise XOR
// relation of the two owners' pads.
struct KeyView {
    std::vector<int> pad_bits;
    std::vector<int> xor_relation;
};

struct PartyState {
    Role role = Role::DataOwner;
    std::string id;
    KeyView key_material;
    std::optional<encoding::MaskedSet> masked_set;  // data owners only
};

// True when a party holds exactly the information its role entitles it to.
inline bool key_view_matches_role(const PartyState& party) {
    if (party.role == Role::ThirdParty) {
        return party.key_material.pad_bits.empty() &&
               !party.masked_set.has_value();
    }
    return party.key_material.xor_relation.empty();
}

// Everything one pairwise comparison produced: who played which role, the
// key-generation report (including retries after key-bit shortfalls), the
// payload channel reports, and the per-index outcomes.
struct GroupReport {
    std::size_t group_index = 0;
    std::size_t first_party = 0;   // control-side owner (index into sets)
    std::size_t second_party = 0;  // target-side owner
    std::size_t keygen_attempts = 0;
    qss::KeygenReport keygen;
    channel::ChannelReport payload_from_first;
    channel::ChannelReport payload_from_second;
    encoding::BinaryMask binary_mask;
    PartyState first_owner;
    PartyState second_owner;
    PartyState third_party;
    std::vector<MembershipCode> codes;  // one per index j
    OutcomeCounts counts;
};

struct ProtocolResult {
    std::size_t intersection_cardinality = 0;
    std::size_t union_cardinality = 0;
    OutcomeCounts counts;
    std::uint64_t multiplier = 0;  // the shared masking key k
    std::vector<GroupReport> groups;
    ResourceCounters resources;
    Transcript transcript;
};

// Protocol knobs. Everything has a production default; the forced_* fields
// pin values that are normally drawn from the shared key source, which is
// how invariance experiments and worked examples fix k or the binary mask.
struct RunConfig {
    std::optional<std::size_t> delta;  // key-round surplus; default 12q + 64
    double test_fraction = 0.125;
    double error_threshold = 0.0;
    channel::AdversaryStrategy adversary = channel::AdversaryStrategy::none();
    std::optional<std::size_t> decoys_per_message;  // default: payload length
    encoding::KeySourceKind key_source = encoding::KeySourceKind::IdealOracle;
    std::optional<std::uint64_t> forced_multiplier;
    std::optional<std::vector<int>> forced_binary_mask;
    std::size_t max_keygen_attempts = 8;
};

}  // namespace qpsi::protocol
