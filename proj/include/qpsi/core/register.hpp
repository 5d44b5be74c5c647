#pragma once

#include <memory>
#include <stdexcept>
#include <utility>

#include "qpsi/core/density.hpp"
#include "qpsi/core/gates.hpp"
#include "qpsi/core/measurement.hpp"
#include "qpsi/core/statevector.hpp"

namespace qpsi::core {

class Register;
using RegisterPtr = std::shared_ptr<Register>;

// A register owns a StateVector that several parties may hold wires of.
// Registers are session-confined: they exist so that qubits of one entangled
// state can travel through different channels while every holder keeps a
// stable reference. When two registers are joined (tensored), the absorbed
// one forwards to the surviving root; references through it stay valid.
class Register {
public:
    explicit Register(StateVector s) : state_(std::move(s)) {}

    bool is_root() const { return merged_into_ == nullptr; }

    const StateVector& state() const {
        if (!is_root()) throw std::logic_error("state() on a forwarded register");
        return state_;
    }
    StateVector& state() {
        if (!is_root()) throw std::logic_error("state() on a forwarded register");
        return state_;
    }

private:
    StateVector state_;
    RegisterPtr merged_into_;
    std::size_t offset_ = 0;  // wire offset of this register inside its parent

    friend std::pair<RegisterPtr, std::size_t> resolve_register(
        const RegisterPtr& reg);
    friend RegisterPtr join(const RegisterPtr& a, const RegisterPtr& b);
};

inline RegisterPtr make_register(StateVector s) {
    return std::make_shared<Register>(std::move(s));
}

// Root register plus the offset of `reg`'s wire 0 within it; compresses the
// forwarding chain as it goes.
inline std::pair<RegisterPtr, std::size_t> resolve_register(
    const RegisterPtr& reg) {
    if (reg->is_root()) return {reg, 0};
    auto [root, parent_offset] = resolve_register(reg->merged_into_);
    reg->merged_into_ = root;
    reg->offset_ += parent_offset;
    return {root, reg->offset_};
}

struct QubitRef {
    RegisterPtr reg;
    std::size_t wire = 0;
};

struct ResolvedQubit {
    RegisterPtr reg;  // always a root
    std::size_t wire;
};

inline ResolvedQubit resolve(const QubitRef& q) {
    auto [root, offset] = resolve_register(q.reg);
    return {root, offset + q.wire};
}

// Tensors two registers into one; `b` forwards into the surviving root.
inline RegisterPtr join(const RegisterPtr& a, const RegisterPtr& b) {
    auto [ra, oa] = resolve_register(a);
    auto [rb, ob] = resolve_register(b);
    (void)oa;
    (void)ob;
    if (ra == rb) return ra;
    const std::size_t offset = ra->state_.num_qubits();
    ra->state_ = tensor(ra->state_, rb->state_);
    rb->merged_into_ = ra;
    rb->offset_ = offset;
    return ra;
}

// Extends the root register holding `anchor` by one fresh wire in `state`
// (a single-qubit state) and returns a reference to it.
inline QubitRef append_wire(const QubitRef& anchor, const StateVector& state) {
    if (state.num_qubits() != 1) {
        throw std::invalid_argument("append_wire expects a single-qubit state");
    }
    auto [root, wire] = resolve(anchor);
    (void)wire;
    const std::size_t new_wire = root->state().num_qubits();
    root->state() = tensor(root->state(), state);
    return QubitRef{root, new_wire};
}

inline void apply(const QubitRef& q, GateKind kind) {
    auto r = resolve(q);
    detail::apply_gate_inplace(r.reg->state(), Gate{kind, r.wire, std::nullopt});
}

inline void apply_cnot(const QubitRef& control, const QubitRef& target) {
    auto rc = resolve(control);
    auto rt = resolve(target);
    if (rc.reg != rt.reg) {
        throw std::logic_error("cnot across unjoined registers");
    }
    detail::apply_cnot_inplace(rc.reg->state(), rc.wire, rt.wire);
}

inline int measure_qubit(const QubitRef& q, MeasurementBasis basis,
                         RandomStream& rng) {
    auto r = resolve(q);
    auto result = measure(r.reg->state(), {r.wire}, basis, rng);
    r.reg->state() = std::move(result.state);
    return result.bits[0];
}

inline DensityMatrix qubit_density(const QubitRef& q) {
    auto r = resolve(q);
    return reduced_density(r.reg->state(), {r.wire});
}

}  // namespace qpsi::core
