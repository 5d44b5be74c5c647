#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qpsi/core/statevector.hpp"

namespace qpsi::core {

// Small dense density matrix, used for key-averaging and eavesdropper
// information-gain checks. Not a general mixed-state evolution engine.
class DensityMatrix {
public:
    explicit DensityMatrix(std::size_t dim)
        : dim_(dim), entries_(dim * dim) {}

    std::size_t dim() const { return dim_; }

    const Amplitude& at(std::size_t row, std::size_t col) const {
        return entries_.at(row * dim_ + col);
    }
    Amplitude& at(std::size_t row, std::size_t col) {
        return entries_.at(row * dim_ + col);
    }

    Amplitude trace() const {
        Amplitude t{};
        for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    bool is_hermitian(double tol = kTol) const {
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t c = r; c < dim_; ++c) {
                if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
            }
        }
        return true;
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        DensityMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            m.at(i, i) = Amplitude{1.0 / static_cast<double>(dim), 0.0};
        }
        return m;
    }

private:
    std::size_t dim_;
    std::vector<Amplitude> entries_;
};

// Sum of w_i |s_i><s_i|. Weights must be nonnegative and sum to 1.
inline DensityMatrix average_density(
    const std::vector<std::pair<double, StateVector>>& states) {
    if (states.empty()) {
        throw std::invalid_argument("average_density needs at least one state");
    }
    double wsum = 0.0;
    for (const auto& [w, s] : states) {
        if (w < 0.0) throw std::invalid_argument("negative mixture weight");
        if (s.dim() != states.front().second.dim()) {
            throw std::invalid_argument("mixture states must share a dimension");
        }
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > kTol) {
        throw std::invalid_argument("mixture weights must sum to 1");
    }
    const std::size_t dim = states.front().second.dim();
    DensityMatrix rho(dim);
    for (const auto& [w, s] : states) {
        for (std::size_t r = 0; r < dim; ++r) {
            if (s.amp(r) == Amplitude{}) continue;
            for (std::size_t c = 0; c < dim; ++c) {
                rho.at(r, c) += w * s.amp(r) * std::conj(s.amp(c));
            }
        }
    }
    return rho;
}

// Reduced density matrix of `keep` wires (in the given order), tracing out
// the rest of the register.
inline DensityMatrix reduced_density(const StateVector& state,
                                     const std::vector<std::size_t>& keep) {
    if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
    for (std::size_t q : keep) {
        if (q >= state.num_qubits()) {
            throw std::out_of_range("kept wire out of range");
        }
    }
    const std::size_t k = keep.size();
    const std::size_t dk = std::size_t{1} << k;
    DensityMatrix rho(dk);

    auto kept_bits = [&](std::uint64_t label) {
        std::uint64_t out = 0;
        for (std::size_t q : keep) {
            out = (out << 1) | static_cast<std::uint64_t>(state.bit_of(label, q));
        }
        return out;
    };

    // O(dim^2) over the full register; registers here are tiny.
    for (std::uint64_t i = 0; i < state.dim(); ++i) {
        if (state.amp(i) == Amplitude{}) continue;
        for (std::uint64_t j = 0; j < state.dim(); ++j) {
            if (state.amp(j) == Amplitude{}) continue;
            // Environment bits must agree for the term to survive the trace.
            std::uint64_t env_i = i, env_j = j;
            for (std::size_t q : keep) {
                const std::uint64_t m = state.wire_mask(q);
                env_i &= ~m;
                env_j &= ~m;
            }
            if (env_i != env_j) continue;
            rho.at(kept_bits(i), kept_bits(j)) +=
                state.amp(i) * std::conj(state.amp(j));
        }
    }
    return rho;
}

inline double max_entry_deviation(const DensityMatrix& a,
                                  const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    double d = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r) {
        for (std::size_t c = 0; c < a.dim(); ++c) {
            d = std::max(d, std::abs(a.at(r, c) - b.at(r, c)));
        }
    }
    return d;
}

// Trace distance between single-qubit density matrices, via the closed-form
// eigenvalues of the Hermitian difference.
inline double trace_distance_qubit(const DensityMatrix& a,
                                   const DensityMatrix& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw std::invalid_argument("trace_distance_qubit expects 2x2 matrices");
    }
    const Amplitude d00 = a.at(0, 0) - b.at(0, 0);
    const Amplitude d01 = a.at(0, 1) - b.at(0, 1);
    const Amplitude d11 = a.at(1, 1) - b.at(1, 1);
    const double tr = d00.real() + d11.real();
    const double det = d00.real() * d11.real() - std::norm(d01);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double l1 = tr / 2.0 + disc;
    const double l2 = tr / 2.0 - disc;
    return (std::abs(l1) + std::abs(l2)) / 2.0;
}

}  // namespace qpsi::core
