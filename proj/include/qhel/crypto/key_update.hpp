// Copyright 2026 The qhelearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Pauli key-update algebra.
 *
 * Conjugating the pad (Z^a X^b) through a gate G leaves G applied to the
 * plaintext with a transformed pad (a', b') and a phase:
 *
 *   G (Z^a X^b) = phase * (Z^a' X^b') G
 *
 * For Cliffords the map (a, b) -> (a', b') is a boolean circuit over the
 * key register; T and Rz additionally leave a non-Pauli residue that a
 * server-side gadget must absorb. key_update_rule returns both pieces.
 *
 * Key register layout: bits [0, n) are `a`, bits [n, 2n) are `b`.
 */

#pragma once

#include <string>
#include <vector>

#include "qhel/common/bits.hpp"
#include "qhel/common/errors.hpp"
#include "qhel/sim/gates.hpp"

namespace qhel::crypto {

enum class KeyOpKind {
    Swap,     // swap bits dst, src
    XorInto,  // bit[dst] ^= bit[src]
    Not,      // bit[dst] = !bit[dst]
    AndFresh, // append a fresh bit = bit[dst] & bit[src]
};

struct KeyOp {
    KeyOpKind kind;
    int dst = -1;
    int src = -1;
};

/// Deterministic boolean-register program over the key bits. The register
/// may grow through AndFresh; Clifford updates never use it.
struct KeyUpdateCircuit {
    int num_bits = 0;
    std::vector<KeyOp> ops;

    /// Throws ValidationError on out-of-range register references.
    void validate() const;

    /// Stable textual encoding, used for ciphertext nonce evolution.
    std::string signature() const;
};

/// Reference plaintext semantics of a key-update circuit.
common::Bits eval_key_circuit(const KeyUpdateCircuit &circuit, common::Bits reg);

/// Non-Clifford residue a gadget must correct after the naive gate
/// application on the padded state.
enum class ResidualKind {
    None,
    SCorrection, // T gate: apply S^{b_j} on the padded state
    RzSignFlip,  // Rz gate: physically rotate by (-1)^{b_j} * theta
};

struct KeyUpdateRule {
    KeyUpdateCircuit circuit;
    ResidualKind residual = ResidualKind::None;
    int residual_qubit = -1;
};

/// Key-update rule for one gate on an n-qubit register:
///   X_j, Z_j : identity
///   H_j      : swap(a_j, b_j)
///   S_j      : a_j ^= b_j
///   CNOT(c,t): a_c ^= a_t; b_t ^= b_c
///   T_j      : a_j ^= b_j, plus an S^{b_j} residue
///   Rz_j     : identity, plus the (-1)^{b_j} rotation-sign residue
/// Perm and Ry have no direct rule (gadget and decomposition paths).
KeyUpdateRule key_update_rule(const sim::GateOp &gate, int num_qubits);

} // namespace qhel::crypto
