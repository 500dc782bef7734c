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
 * Quantum one-time pad.
 *
 * A pad key holds per-qubit mask bits (a, b). Encryption applies the X
 * masks first and the Z masks second, so the padded state is
 * (Z^a1 x...x Z^an)(X^b1 x...x X^bn) |psi>. Decryption is the inverse and
 * agrees with the original state up to an unobservable global phase.
 */

#pragma once

#include "qhel/common/bits.hpp"
#include "qhel/common/rng.hpp"
#include "qhel/sim/state_vector.hpp"

namespace qhel::crypto {

/// QOTP key bits; `a` are the Z masks, `b` the X masks.
struct PadKey {
    common::Bits a;
    common::Bits b;

    int num_qubits() const { return static_cast<int>(a.size()); }

    /// Flat register layout used by key ciphertexts and update circuits:
    /// bits [0, n) are `a`, bits [n, 2n) are `b`.
    common::Bits to_bits() const {
        common::Bits out = a;
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }

    static PadKey from_bits(const common::Bits &bits);

    bool operator==(const PadKey &other) const = default;
};

/// 2n i.i.d. uniform key bits.
PadKey gen_pad(int num_qubits, common::Rng &rng);

/// (Z^a)(X^b) applied to `state`.
sim::StateVector qotp_encrypt(const sim::StateVector &state, const PadKey &key);

/// Inverse of qotp_encrypt; round trip has fidelity 1 up to global phase.
sim::StateVector qotp_decrypt(const sim::StateVector &state, const PadKey &key);

/// Classical restriction of the pad on basis labels: x XOR b. The Z masks
/// contribute only a global phase on basis states and are left unused.
common::Bits classical_otp(const common::Bits &x, const PadKey &key);

} // namespace qhel::crypto
