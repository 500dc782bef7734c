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
 * Classical homomorphic key vault.
 *
 * Functional stand-in for a classical FHE scheme: ciphertexts are sealed
 * containers whose wire form is masked, and evaluation happens behind the
 * class boundary. The security split is enforced by interface separation:
 *
 *   HEKeypair  - secret side; the only type that can decrypt.
 *   EvalHandle - public side; can encrypt fresh bits and evaluate
 *                key-update circuits, has no decryption surface.
 *
 * There is deliberately no accessor from ciphertext or handle to plaintext
 * bits, so "decrypt via the evaluation handle" is unrepresentable. A real
 * FHE backend can replace this class behind the same interface.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qhel/common/bits.hpp"
#include "qhel/common/errors.hpp"
#include "qhel/common/rng.hpp"
#include "qhel/crypto/key_update.hpp"

namespace qhel::crypto {

class KeyCiphertext;
class EvalHandle;

namespace detail {
struct VaultCore;
}

namespace sealed {
common::Bits gadget_key_view(const EvalHandle &, const KeyCiphertext &);
}

/// Sealed encryption of a key-bit register, bound to one vault.
class KeyCiphertext {
  public:
    KeyCiphertext() = default;

    std::uint64_t vault_id() const { return vault_id_; }
    int num_bits() const { return num_bits_; }

    /// Opaque wire bytes: vault id, nonce, bit count, masked payload.
    std::vector<std::uint8_t> serialize() const;
    static KeyCiphertext deserialize(const std::vector<std::uint8_t> &wire);

    std::string hex() const { return common::to_hex(serialize()); }

    /// Wire size in bits for a register of `num_key_bits` bits.
    static std::size_t wire_bits(int num_key_bits);

    bool operator==(const KeyCiphertext &other) const = default;

  private:
    friend class HEKeypair;
    friend class EvalHandle;
    friend common::Bits sealed::gadget_key_view(const EvalHandle &,
                                                const KeyCiphertext &);

    std::uint64_t vault_id_ = 0;
    std::uint64_t nonce_ = 0;
    int num_bits_ = 0;
    std::vector<std::uint8_t> masked_; // packed, XORed with the wire keystream
};

/// Public evaluation side of a vault. Copyable; this is what the server holds.
class EvalHandle {
  public:
    std::uint64_t vault_id() const;

    /// Public-key encryption of fresh bits (nonce drawn from `rng`).
    KeyCiphertext encrypt(const common::Bits &bits, common::Rng &rng) const;

    /// Homomorphic evaluation; deterministic in (ciphertext, circuit).
    KeyCiphertext eval(const KeyCiphertext &ct, const KeyUpdateCircuit &circuit) const;

  private:
    friend class HEKeypair;
    friend common::Bits sealed::gadget_key_view(const EvalHandle &,
                                                const KeyCiphertext &);
    explicit EvalHandle(std::shared_ptr<const detail::VaultCore> core);
    std::shared_ptr<const detail::VaultCore> core_;
};

/// Secret side of a vault; create one per client.
class HEKeypair {
  public:
    static HEKeypair create(common::Rng &rng);

    std::uint64_t vault_id() const;
    EvalHandle handle() const;

    common::Bits decrypt(const KeyCiphertext &ct) const;

  private:
    explicit HEKeypair(std::shared_ptr<const detail::VaultCore> core);
    std::shared_ptr<const detail::VaultCore> core_;
};

inline KeyCiphertext he_encrypt(const common::Bits &bits, const EvalHandle &handle,
                                common::Rng &rng) {
    return handle.encrypt(bits, rng);
}

inline KeyCiphertext he_encrypt(const common::Bits &bits, const HEKeypair &keypair,
                                common::Rng &rng) {
    return keypair.handle().encrypt(bits, rng);
}

inline common::Bits he_decrypt(const KeyCiphertext &ct, const HEKeypair &keypair) {
    return keypair.decrypt(ct);
}

inline KeyCiphertext he_eval(const KeyCiphertext &ct, const KeyUpdateCircuit &circuit,
                             const EvalHandle &handle) {
    return handle.eval(ct, circuit);
}

} // namespace qhel::crypto
