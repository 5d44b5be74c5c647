#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "qpsi/protocol/types.hpp"

namespace qpsi::harness {

// Exact ratio type so efficiency figures can be compared without rounding.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    friend bool operator==(const Rational& lhs, const Rational& rhs) {
        return lhs.num * rhs.den == rhs.num * lhs.den;
    }
};

inline Rational make_rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    if (g != 0) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.num) / static_cast<double>(r.den);
}

// Qubit efficiency: payload bits recovered per core qubit-or-classical-bit
// consumed.  Each of the ceil(m/2) evaluation groups costs 16q core qubits
// (three resource qubits per delivered key round, 4q rounds kept, plus the
// two 2q-qubit payload transmissions), and the announced result is two
// classical values.
inline Rational qubit_efficiency(std::size_t q, std::size_t m) {
    if (q < 2) throw std::invalid_argument("modulus must be at least 2");
    if (m < 2) throw std::invalid_argument("need at least two data owners");
    const std::int64_t groups = static_cast<std::int64_t>((m + 1) / 2);
    const std::int64_t cost = 16 * groups * static_cast<std::int64_t>(q) + 2;
    return make_rational(static_cast<std::int64_t>(q), cost);
}

// The same figure recomputed from a finished run's resource counters.
inline Rational measured_efficiency(const protocol::ResourceCounters& r,
                                    std::size_t q) {
    return make_rational(
        static_cast<std::int64_t>(q),
        static_cast<std::int64_t>(r.qubits_prepared_core +
                                  r.classical_bits_output));
}

// Cross-checks a run's resource accounting against the closed-form costs:
//  - core qubits are exactly 16q per group,
//  - exactly two classical values are announced,
//  - total preparations can only exceed core (decoys, retries),
//  - payload transmissions seen on the wire sum to 4q qubits per group.
inline bool verify_resources(const protocol::ProtocolResult& result,
                             std::size_t q, std::size_t m) {
    const std::size_t groups = (m + 1) / 2;
    if (result.groups.size() != groups) return false;
    const protocol::ResourceCounters& r = result.resources;
    if (r.qubits_prepared_core != 16 * groups * q) return false;
    if (r.classical_bits_output != 2) return false;
    if (r.qubits_prepared_total < r.qubits_prepared_core) return false;
    std::size_t payload_qubits = 0;
    for (const protocol::TranscriptEvent& event : result.transcript) {
        if (event.phase == "payload") payload_qubits += event.qubits;
    }
    return payload_qubits == 4 * groups * q;
}

}  // namespace qpsi::harness
