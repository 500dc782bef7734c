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
 * Sealed gadget port.
 *
 * Some server-side operations (T-gate correction, parameterized rotations,
 * register permutations, feature-map preparation) need the key bits inside
 * a tamper-sealed unit whose only output is the corrected quantum state.
 * `gadget_key_view` models the interior of that unit: it is the one place
 * outside the keypair that can open a ciphertext, and every call site is a
 * gadget implementation. Nothing returned from here may be written to a
 * server view log or a transcript.
 */

#pragma once

#include "qhel/common/bits.hpp"
#include "qhel/crypto/vault.hpp"

namespace qhel::crypto::sealed {

/// Key bits as seen from inside a sealed gadget. Gadget implementations only.
common::Bits gadget_key_view(const EvalHandle &handle, const KeyCiphertext &ct);

} // namespace qhel::crypto::sealed
