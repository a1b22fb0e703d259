#pragma once

// Quantum Fourier transform on a qubit register, decomposed into the
// standard gate set: Hadamard, controlled phase shift R_k (phase
// e^{2*pi*i / 2^k}) and a final qubit-order reversal by swaps.
//
// Bit j of a register value is qubit j, so qubit width-1 is the most
// significant.  The circuit reproduces the DFT matrix with entries
// omega^{jk} / sqrt(2^w), omega = e^{2*pi*i / 2^w}.

#include "qsieve/sim/state.hpp"

#include <cmath>
#include <numbers>

namespace qsieve::sim {

namespace detail {

struct QubitRegister {
    std::size_t offset;
    unsigned width;
};

inline QubitRegister qubit_register(const QuantumState& state, const std::string& id) {
    const std::size_t reg = state.register_index(id);
    const Domain& dom = state.registers()[reg].domain;
    if (dom.kind() != Domain::Kind::qubits) {
        throw std::invalid_argument("QFT requires qubit register ('" + id + "' is not one)");
    }
    return {state.slot_offset(reg), dom.width()};
}

}  // namespace detail

inline QuantumState hadamard(QuantumState state, const std::string& register_id, unsigned qubit) {
    const auto [off, width] = detail::qubit_register(state, register_id);
    if (qubit >= width) throw std::invalid_argument("qubit index out of range");
    if (state.support() * 2 > kSupportCap) throw std::runtime_error("support cap exceeded");

    const RegWord mask = RegWord(1) << qubit;
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<Term> out;
    out.reserve(state.terms().size() * 2);
    for (const Term& t : state.terms()) {
        const bool one = t.key[off] & mask;
        Term lo, hi;
        lo.key = t.key;
        lo.key[off] &= ~mask;
        lo.amp = t.amp * s;
        hi.key = t.key;
        hi.key[off] |= mask;
        hi.amp = t.amp * (one ? -s : s);
        out.push_back(std::move(lo));
        out.push_back(std::move(hi));
    }
    QuantumState result = detail::StateAccess::make(
        std::vector<RegisterSpec>(state.registers()), std::move(out), state.pruned_mass());
    detail::canonicalize(result, true);
    detail::check_normalized(result, "hadamard");
    return result;
}

/// Multiplies the amplitude by e^{i*angle} where both qubits are 1.
inline QuantumState controlled_phase(QuantumState state, const std::string& register_id,
                                     unsigned control, unsigned target, double angle) {
    const auto [off, width] = detail::qubit_register(state, register_id);
    if (control >= width || target >= width || control == target) {
        throw std::invalid_argument("bad control/target qubits");
    }
    const RegWord both = (RegWord(1) << control) | (RegWord(1) << target);
    const Amplitude phase = std::polar(1.0, angle);
    for (Term& t : detail::StateAccess::terms(state)) {
        if ((t.key[off] & both) == both) t.amp *= phase;
    }
    detail::check_normalized(state, "controlled_phase");
    return state;
}

inline QuantumState swap_qubits(QuantumState state, const std::string& register_id,
                                unsigned q1, unsigned q2) {
    const auto [off, width] = detail::qubit_register(state, register_id);
    if (q1 >= width || q2 >= width) throw std::invalid_argument("qubit index out of range");
    if (q1 == q2) return state;
    for (Term& t : detail::StateAccess::terms(state)) {
        RegWord v = t.key[off];
        const RegWord b1 = (v >> q1) & 1;
        const RegWord b2 = (v >> q2) & 1;
        if (b1 != b2) {
            v ^= (RegWord(1) << q1) | (RegWord(1) << q2);
            t.key[off] = v;
        }
    }
    detail::canonicalize(state, false, "swap produced colliding terms");
    detail::check_normalized(state, "swap_qubits");
    return state;
}

inline QuantumState qft(QuantumState state, const std::string& register_id) {
    const unsigned width = detail::qubit_register(state, register_id).width;
    for (unsigned t = width; t-- > 0;) {
        state = hadamard(std::move(state), register_id, t);
        for (unsigned c = t; c-- > 0;) {
            const unsigned k = t - c + 1;
            state = controlled_phase(std::move(state), register_id, c, t,
                                     2.0 * std::numbers::pi / double(RegWord(1) << k));
        }
    }
    for (unsigned q = 0; q < width / 2; ++q) {
        state = swap_qubits(std::move(state), register_id, q, width - 1 - q);
    }
    return state;
}

inline QuantumState inverse_qft(QuantumState state, const std::string& register_id) {
    const unsigned width = detail::qubit_register(state, register_id).width;
    for (unsigned q = width / 2; q-- > 0;) {
        state = swap_qubits(std::move(state), register_id, q, width - 1 - q);
    }
    for (unsigned t = 0; t < width; ++t) {
        for (unsigned c = 0; c < t; ++c) {
            const unsigned k = t - c + 1;
            state = controlled_phase(std::move(state), register_id, c, t,
                                     -2.0 * std::numbers::pi / double(RegWord(1) << k));
        }
        state = hadamard(std::move(state), register_id, t);
    }
    return state;
}

}  // namespace qsieve::sim
