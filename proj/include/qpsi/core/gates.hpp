#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "qpsi/core/statevector.hpp"

namespace qpsi::core {

// The gate set is deliberately exactly {X, Z, H, CNOT}; nothing in this
// library needs a T gate or arbitrary rotations.
enum class GateKind { X, Z, H, Cnot };

struct Gate {
    GateKind kind;
    std::size_t target;
    std::optional<std::size_t> control;  // CNOT only

    static Gate x(std::size_t t) { return {GateKind::X, t, std::nullopt}; }
    static Gate z(std::size_t t) { return {GateKind::Z, t, std::nullopt}; }
    static Gate h(std::size_t t) { return {GateKind::H, t, std::nullopt}; }
    static Gate cnot(std::size_t c, std::size_t t) { return {GateKind::Cnot, t, c}; }
};

namespace detail {

inline void apply_x_inplace(StateVector& s, std::size_t wire) {
    const std::uint64_t m = s.wire_mask(wire);
    auto& a = s.amplitudes();
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if ((i & m) == 0) std::swap(a[i], a[i | m]);
    }
}

inline void apply_z_inplace(StateVector& s, std::size_t wire) {
    const std::uint64_t m = s.wire_mask(wire);
    auto& a = s.amplitudes();
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if (i & m) a[i] = -a[i];
    }
}

inline void apply_h_inplace(StateVector& s, std::size_t wire) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const std::uint64_t m = s.wire_mask(wire);
    auto& a = s.amplitudes();
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if ((i & m) == 0) {
            const Amplitude lo = a[i];
            const Amplitude hi = a[i | m];
            a[i] = (lo + hi) * inv_sqrt2;
            a[i | m] = (lo - hi) * inv_sqrt2;
        }
    }
}

inline void apply_cnot_inplace(StateVector& s, std::size_t control,
                               std::size_t target) {
    if (control == target) {
        throw std::invalid_argument("cnot control == target");
    }
    const std::uint64_t cm = s.wire_mask(control);
    const std::uint64_t tm = s.wire_mask(target);
    auto& a = s.amplitudes();
    for (std::uint64_t i = 0; i < s.dim(); ++i) {
        if ((i & cm) && (i & tm) == 0) std::swap(a[i], a[i | tm]);
    }
}

inline void apply_gate_inplace(StateVector& s, const Gate& g) {
    switch (g.kind) {
        case GateKind::X: apply_x_inplace(s, g.target); break;
        case GateKind::Z: apply_z_inplace(s, g.target); break;
        case GateKind::H: apply_h_inplace(s, g.target); break;
        case GateKind::Cnot:
            if (!g.control) throw std::invalid_argument("cnot needs a control");
            apply_cnot_inplace(s, *g.control, g.target);
            break;
    }
}

}  // namespace detail

inline StateVector apply_gate(const StateVector& state, const Gate& gate) {
    StateVector out = state;
    detail::apply_gate_inplace(out, gate);
    return out;
}

}  // namespace qpsi::core
