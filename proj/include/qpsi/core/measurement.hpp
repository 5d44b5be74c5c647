#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpsi/core/gates.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/statevector.hpp"

namespace qpsi::core {

// X-basis measurement is H conjugation followed by a Z-basis measurement;
// outcome bit 0 means '+' and 1 means '-'.
enum class MeasurementBasis { Z, X };

inline char outcome_label(MeasurementBasis basis, int bit) {
    if (basis == MeasurementBasis::Z) return bit ? '1' : '0';
    return bit ? '-' : '+';
}

struct MeasurementResult {
    std::vector<int> bits;  // one per measured qubit, in the order requested
    StateVector state;      // collapsed and renormalized
};

namespace detail {

inline void check_measured_qubits(const StateVector& s,
                                  const std::vector<std::size_t>& qubits) {
    if (qubits.empty()) {
        throw std::invalid_argument("measurement needs at least one qubit");
    }
    for (std::size_t q : qubits) {
        if (q >= s.num_qubits()) {
            throw std::out_of_range("measured qubit out of range");
        }
    }
    auto sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("measured qubits must be distinct");
    }
}

// Packs the bits of `label` at `qubits` into an outcome value, first listed
// qubit most significant.
inline std::uint64_t extract_outcome(const StateVector& s, std::uint64_t label,
                                     const std::vector<std::size_t>& qubits) {
    std::uint64_t out = 0;
    for (std::size_t q : qubits) {
        out = (out << 1) | static_cast<std::uint64_t>(s.bit_of(label, q));
    }
    return out;
}

}  // namespace detail

// Exact Born probabilities of measuring `qubits` in `basis`; entries with
// probability below kTol are dropped. Keys pack the outcome bits with the
// first listed qubit most significant.
inline std::map<std::uint64_t, double> measurement_distribution(
    const StateVector& state, const std::vector<std::size_t>& qubits,
    MeasurementBasis basis) {
    detail::check_measured_qubits(state, qubits);
    StateVector s = state;
    if (basis == MeasurementBasis::X) {
        for (std::size_t q : qubits) detail::apply_h_inplace(s, q);
    }
    std::map<std::uint64_t, double> dist;
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        const double p = std::norm(s.amp(i));
        if (p > 0.0) dist[detail::extract_outcome(s, i, qubits)] += p;
    }
    std::erase_if(dist, [](const auto& kv) { return kv.second < kTol; });
    return dist;
}

// Samples an outcome from the Born distribution and collapses the state.
inline MeasurementResult measure(const StateVector& state,
                                 const std::vector<std::size_t>& qubits,
                                 MeasurementBasis basis, RandomStream& rng) {
    detail::check_measured_qubits(state, qubits);
    StateVector s = state;
    if (basis == MeasurementBasis::X) {
        for (std::size_t q : qubits) detail::apply_h_inplace(s, q);
    }

    auto dist = measurement_distribution(s, qubits, MeasurementBasis::Z);
    const double u = rng.real();
    double acc = 0.0;
    std::uint64_t outcome = dist.rbegin()->first;
    for (const auto& [value, p] : dist) {
        acc += p;
        if (u < acc) {
            outcome = value;
            break;
        }
    }

    // Project onto the outcome and renormalize.
    double kept = 0.0;
    auto& amps = s.amplitudes();
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (detail::extract_outcome(s, i, qubits) != outcome) {
            amps[i] = Amplitude{};
        } else {
            kept += std::norm(amps[i]);
        }
    }
    const double scale = 1.0 / std::sqrt(kept);
    for (auto& a : amps) a *= scale;

    if (basis == MeasurementBasis::X) {
        for (std::size_t q : qubits) detail::apply_h_inplace(s, q);
    }

    std::vector<int> bits(qubits.size());
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        bits[i] = static_cast<int>((outcome >> (qubits.size() - 1 - i)) & 1u);
    }
    return MeasurementResult{std::move(bits), std::move(s)};
}

}  // namespace qpsi::core
