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
 * Server-side homomorphic evaluation over pad-encrypted states.
 *
 * The server holds the padded statevector and the sealed key ciphertext.
 * Clifford gates act directly on the padded state while the key ciphertext
 * evolves through he_eval; T and Rz route through sealed gadgets that read
 * the key bits only inside the gadget boundary; Ry is rewritten as
 * S H Rz(theta) H S Z, which leaves the pad unchanged; register
 * permutations re-encrypt under a fresh pad inside the gadget.
 *
 * Measuring Z_k on the padded state yields w = (-1)^{b_k} <Z_k>_plain, so
 * the client recovers the plaintext expectation from the key ciphertext
 * alone.
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qhel/crypto/pad.hpp"
#include "qhel/crypto/vault.hpp"
#include "qhel/sim/gates.hpp"
#include "qhel/sim/measure.hpp"
#include "qhel/sim/state_vector.hpp"

namespace qhel::engine {

class ServerViewLog;

/// Pad-encrypted state together with its sealed key, as held by the server.
struct EncryptedState {
    sim::StateVector padded;
    crypto::KeyCiphertext key_ct;
    std::uint64_t session_id = 0;
};

/// Gate list with optional named parameter slots on rotation gates.
class ServerCircuit {
  public:
    /// Appends a fixed gate.
    void add(sim::GateOp gate);

    /// Appends an Rz or Ry whose angle is bound later through `bind`.
    void add(sim::GateOp gate, std::string slot);

    /// Copy with every listed slot bound to its angle. Unknown names throw.
    ServerCircuit bind(const std::map<std::string, double> &values) const;

    /// Gate list for evaluation; throws if any slot is still unbound.
    std::vector<sim::GateOp> bound_gates() const;

    bool fully_bound() const;
    std::size_t size() const { return entries_.size(); }

  private:
    struct Entry {
        sim::GateOp gate;
        std::string slot; // empty = bound
    };
    std::vector<Entry> entries_;
};

/// Sign-encrypted measurement result for one Z_k observable.
struct EncryptedExpectation {
    double w = 0.0; // (-1)^{b_k} times the plaintext expectation
    crypto::KeyCiphertext key_ct_out;
    int k = 0;
    std::uint64_t shots = 0; // 0 = exact
};

/// Client-side: pads a plaintext state and seals the pad into the vault.
EncryptedState encrypt_state(const sim::StateVector &plain, const crypto::PadKey &pad,
                             const crypto::EvalHandle &handle, common::Rng &rng,
                             std::uint64_t session_id = 0);

/// Client-side: recovers the plaintext state (tests and end-of-protocol only).
sim::StateVector decrypt_state(const EncryptedState &es,
                               const crypto::HEKeypair &keypair);

/// Client-side: strips the sign mask off a measured expectation.
double decrypt_expectation(const EncryptedExpectation &ex,
                           const crypto::HEKeypair &keypair);

/// Runs the circuit on the encrypted state, updating the key ciphertext as
/// it goes. `rng` feeds the fresh pads of permutation gadgets.
EncryptedState homomorphic_apply(const EncryptedState &es, const ServerCircuit &circuit,
                                 const crypto::EvalHandle &handle, common::Rng &rng,
                                 ServerViewLog *log = nullptr);

/// Sealed gadget with plaintext effect exactly Rz_j(theta): physically
/// rotates by (-1)^{b_j} theta, key bits untouched.
EncryptedState rotation_gadget(const EncryptedState &es, int j, double theta,
                               const crypto::EvalHandle &handle,
                               ServerViewLog *log = nullptr);

/// Sealed gadget with plaintext effect exactly T_j: naive T, then an
/// S^{b_j} correction, key update a_j ^= b_j.
EncryptedState t_gadget(const EncryptedState &es, int j,
                        const crypto::EvalHandle &handle,
                        ServerViewLog *log = nullptr);

/// Sealed gadget applying a basis permutation; re-encrypts under a fresh
/// pad and re-issues the key ciphertext.
EncryptedState permutation_gadget(const EncryptedState &es, const sim::GateOp &perm,
                                  const crypto::EvalHandle &handle, common::Rng &rng,
                                  ServerViewLog *log = nullptr);

/// Measures Z_k on the padded state; exact when shots = 0.
EncryptedExpectation encrypted_expectation_z(const EncryptedState &es, int k,
                                             std::uint64_t shots, common::Rng &rng,
                                             ServerViewLog *log = nullptr);

enum class TwirlKind { Full, ZOnly, XOnly };

/// Max entrywise deviation of the pad-averaged density matrix from the
/// maximally mixed state. Full twirls vanish; partial twirls need not.
double audit_mixedness(const sim::StateVector &psi, TwirlKind kind = TwirlKind::Full);

} // namespace qhel::engine
