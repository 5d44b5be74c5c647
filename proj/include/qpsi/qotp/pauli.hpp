#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpsi/core/gates.hpp"
#include "qpsi/core/statevector.hpp"

namespace qpsi::qotp {

// Per-qubit encryption key: the state is encrypted by X^a Z^b.
struct PauliKey {
    int a = 0;  // X exponent
    int b = 0;  // Z exponent
};

// The two X exponents used on the two qubits of one encoded item.
struct KeyPair2 {
    int alpha = 0;
    int beta = 0;
};

// Generic decryption key: per-wire X exponents (zeta) and Z exponents (eta).
// Only the X part affects computational-basis outcomes, but both are carried.
struct DecryptionKey {
    std::vector<int> zeta;
    std::vector<int> eta;
};

inline DecryptionKey make_decryption_key(std::vector<int> zeta,
                                         std::vector<int> eta) {
    if (zeta.size() != eta.size()) {
        throw std::invalid_argument("zeta and eta must have equal length");
    }
    for (int bit : zeta) {
        if (bit != 0 && bit != 1) throw std::invalid_argument("zeta bits only");
    }
    for (int bit : eta) {
        if (bit != 0 && bit != 1) throw std::invalid_argument("eta bits only");
    }
    return DecryptionKey{std::move(zeta), std::move(eta)};
}

namespace detail {
inline void check_key_bits(const PauliKey& key) {
    if ((key.a != 0 && key.a != 1) || (key.b != 0 && key.b != 1)) {
        throw std::invalid_argument("pauli key bits must be 0 or 1");
    }
}
}  // namespace detail

// Encryption operator X^a Z^b on one wire (Z first, then X).
inline core::StateVector apply_pauli(const core::StateVector& state,
                                     const PauliKey& key, std::size_t wire) {
    detail::check_key_bits(key);
    core::StateVector s = state;
    if (key.b) core::detail::apply_z_inplace(s, wire);
    if (key.a) core::detail::apply_x_inplace(s, wire);
    return s;
}

// Decryption operator (X^a Z^b)^-1 = Z^b X^a on one wire.
inline core::StateVector apply_pauli_inverse(const core::StateVector& state,
                                             const PauliKey& key,
                                             std::size_t wire) {
    detail::check_key_bits(key);
    core::StateVector s = state;
    if (key.a) core::detail::apply_x_inplace(s, wire);
    if (key.b) core::detail::apply_z_inplace(s, wire);
    return s;
}

// One key per wire; X^a Z^b applied on each. The protocol path always uses
// b = 0 (phase keys change nothing measurable there), but the full calculus
// is supported.
inline core::StateVector encrypt(const core::StateVector& state,
                                 const std::vector<PauliKey>& keys,
                                 const std::vector<std::size_t>& wires) {
    if (keys.size() != wires.size()) {
        throw std::invalid_argument("one key per wire required");
    }
    core::StateVector s = state;
    for (std::size_t i = 0; i < wires.size(); ++i) {
        s = apply_pauli(s, keys[i], wires[i]);
    }
    return s;
}

inline core::StateVector decrypt_with_keys(
    const core::StateVector& state, const std::vector<PauliKey>& keys,
    const std::vector<std::size_t>& wires) {
    if (keys.size() != wires.size()) {
        throw std::invalid_argument("one key per wire required");
    }
    core::StateVector s = state;
    for (std::size_t i = 0; i < wires.size(); ++i) {
        s = apply_pauli_inverse(s, keys[i], wires[i]);
    }
    return s;
}

// Key-update rule of the CNOT gate: pushing CNOT through the jointly
// encrypted pair turns keys ((a_c,b_c),(a_t,b_t)) into
// ((a_c, b_c^b_t), (a_c^a_t, b_t)). An exact operator identity; no phase
// corrections are needed.
inline std::pair<PauliKey, PauliKey> cnot_key_update(
    const PauliKey& control_key, const PauliKey& target_key) {
    detail::check_key_bits(control_key);
    detail::check_key_bits(target_key);
    PauliKey control_out{control_key.a, control_key.b ^ target_key.b};
    PauliKey target_out{control_key.a ^ target_key.a, target_key.b};
    return {control_out, target_out};
}

// The third party's decryption key for one evaluated pair. It is derived
// from published XOR relations only — callers cannot hand over individual
// user keys through this interface, which keeps "the third party knows only
// the XOR of the user keys" structural.
inline KeyPair2 derive_tp_decryption_key(int xor_alpha, int xor_beta) {
    if ((xor_alpha != 0 && xor_alpha != 1) ||
        (xor_beta != 0 && xor_beta != 1)) {
        throw std::invalid_argument("xor bits must be 0 or 1");
    }
    return KeyPair2{xor_alpha, xor_beta};
}

// Applies X^alpha, X^beta on the two target wires of an evaluated pair.
inline core::StateVector decrypt(const core::StateVector& state,
                                 const KeyPair2& sk,
    const std::vector<std::size_t>& wires) {
    if (wires.size() != 2) {
        throw std::invalid_argument("decrypt expects exactly two wires");
    }
    return decrypt_with_keys(
        state, {PauliKey{sk.alpha, 0}, PauliKey{sk.beta, 0}}, wires);
}

}  // namespace qpsi::qotp
