#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpsi::core {

using Amplitude = std::complex<double>;

// Tolerance for algebraic identities (norms, unitarity, exact mixtures).
inline constexpr double kTol = 1e-12;

// Dense statevector over a small qubit register.
//
// Qubit ordering convention, used everywhere in this library: qubit 0 is the
// MOST significant bit of a basis-state label, so the label of |b0 b1 b2>
// reads left to right. |01> is basis index 1 on two qubits.
class StateVector {
public:
    // |0...0> on num_qubits wires.
    explicit StateVector(std::size_t num_qubits)
        : num_qubits_(num_qubits), amps_(dim_of(num_qubits)) {
        amps_[0] = Amplitude{1.0, 0.0};
    }

    static StateVector basis(std::size_t num_qubits, std::uint64_t label) {
        StateVector s(num_qubits);
        if (label >= s.dim()) {
            throw std::out_of_range("basis label out of range");
        }
        s.amps_[0] = Amplitude{0.0, 0.0};
        s.amps_[label] = Amplitude{1.0, 0.0};
        return s;
    }

    // Basis state from a left-to-right bit string, e.g. "01" -> |01>.
    static StateVector basis(const std::string& bits) {
        std::uint64_t label = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw std::invalid_argument("bit string must be over {0,1}");
            }
            label = (label << 1) | static_cast<std::uint64_t>(c - '0');
        }
        return basis(bits.size(), label);
    }

    static StateVector from_amplitudes(std::size_t num_qubits,
                                       std::vector<Amplitude> amps) {
        if (amps.size() != dim_of(num_qubits)) {
            throw std::invalid_argument("amplitude count must be 2^num_qubits");
        }
        StateVector s(num_qubits);
        s.amps_ = std::move(amps);
        if (!s.is_normalized()) {
            throw std::invalid_argument("amplitudes must be normalized");
        }
        return s;
    }

    // Infers the qubit count from the amplitude count (a power of two >= 2).
    static StateVector from_amplitudes(std::vector<Amplitude> amps) {
        std::size_t n = 0;
        while ((std::size_t{1} << n) < amps.size()) ++n;
        if (amps.size() < 2 || (std::size_t{1} << n) != amps.size()) {
            throw std::invalid_argument(
                "amplitude count must be a power of two >= 2");
        }
        return from_amplitudes(n, std::move(amps));
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    const Amplitude& amp(std::uint64_t label) const { return amps_.at(label); }
    const std::vector<Amplitude>& amplitudes() const { return amps_; }
    std::vector<Amplitude>& amplitudes() { return amps_; }

    double probability(std::uint64_t label) const {
        return std::norm(amps_.at(label));
    }

    double norm() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    bool is_normalized(double tol = kTol) const {
        return std::abs(norm() - 1.0) <= tol;
    }

    // Index mask for one wire under the MSB-first convention.
    std::uint64_t wire_mask(std::size_t wire) const {
        if (wire >= num_qubits_) throw std::out_of_range("wire out of range");
        return 1ull << (num_qubits_ - 1 - wire);
    }

    int bit_of(std::uint64_t label, std::size_t wire) const {
        return (label & wire_mask(wire)) ? 1 : 0;
    }

private:
    static std::size_t dim_of(std::size_t num_qubits) {
        if (num_qubits == 0 || num_qubits > 30) {
            throw std::invalid_argument("num_qubits must be in [1, 30]");
        }
        return std::size_t{1} << num_qubits;
    }

    std::size_t num_qubits_;
    std::vector<Amplitude> amps_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<Amplitude> out(a.dim() * b.dim());
    for (std::uint64_t i = 0; i < a.dim(); ++i) {
        if (a.amp(i) == Amplitude{}) continue;
        for (std::uint64_t j = 0; j < b.dim(); ++j) {
            out[(i << b.num_qubits()) | j] = a.amp(i) * b.amp(j);
        }
    }
    return StateVector::from_amplitudes(a.num_qubits() + b.num_qubits(),
                                        std::move(out));
}

inline double max_amplitude_deviation(const StateVector& a,
                                      const StateVector& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("dimension mismatch");
    }
    double d = 0.0;
    for (std::uint64_t i = 0; i < a.dim(); ++i) {
        d = std::max(d, std::abs(a.amp(i) - b.amp(i)));
    }
    return d;
}

}  // namespace qpsi::core
