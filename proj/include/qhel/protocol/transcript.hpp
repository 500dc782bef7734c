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
 * Protocol messages, transcripts, and communication-cost accounting.
 *
 * A round is one completed client-to-server block answered by a
 * server-to-client block; a trailing upload (ParamUpdate) opens a new trip
 * but adds no round until the server answers something again. Message
 * payload sizes follow declared constants: 128-bit request headers, 64 bits
 * per evaluation descriptor or scalar, and key-ciphertext sizes from the
 * vault wire format.
 *
 * The blind-computing baseline is an analytical cost model with declared
 * brickwork constants (4 slots per single-qubit gate, 8 per CNOT, two
 * classical bits per qubit-slot); it is a modeled estimate for comparison,
 * not a simulation of a blind protocol.
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qhel/common/errors.hpp"
#include "qhel/sim/gates.hpp"

namespace qhel::protocol {

enum class Direction { ClientToServer, ServerToClient };

enum class MessageKind {
    EncryptedSample,
    EvalRequest,
    EvalResponse,
    ParamUpdate,
    KernelRequest,
    KernelResponse,
};

std::string direction_name(Direction dir);
std::string kind_name(MessageKind kind);

/// True for kinds the client sends; responses come from the server.
bool client_sends(MessageKind kind);

struct Message {
    Direction direction = Direction::ClientToServer;
    MessageKind kind = MessageKind::EncryptedSample;
    std::uint64_t qubits = 0;
    std::uint64_t classical_bits = 0;
    std::uint64_t session = 0;
    std::uint64_t round = 0; // assigned by Transcript::append
};

struct Totals {
    std::uint64_t qubits_sent = 0;
    std::uint64_t classical_bits = 0;
    std::uint64_t rounds = 0;

    bool operator==(const Totals &other) const = default;
};

/// Append-only message log with cached totals and grammar checking.
class Transcript {
  public:
    /// Validates kind/direction and response pairing, stamps the round
    /// index, and updates the totals cache. Violations throw.
    void append(Message msg);

    const std::vector<Message> &messages() const { return messages_; }
    std::size_t size() const { return messages_.size(); }
    const Totals &totals() const { return cache_; }

    std::string to_jsonl() const;

  private:
    std::vector<Message> messages_;
    Totals cache_;
    std::uint64_t trip_ = 0;
    std::map<std::uint64_t, std::uint64_t> pending_eval_;
    std::map<std::uint64_t, std::uint64_t> pending_kernel_;
};

/// Recomputes totals from the raw messages, cross-checks the cache, and
/// returns them. A cache divergence is a bookkeeping bug and throws.
Totals account(const Transcript &transcript);

inline constexpr std::uint64_t kRequestHeaderBits = 128;
inline constexpr std::uint64_t kEvalDescriptorBits = 64;
inline constexpr std::uint64_t kScalarBits = 64;

/// One padded n-qubit state plus its sealed key ciphertext.
Message encrypted_sample(std::uint64_t session, int num_qubits);

/// Classical variant: n masked bits plus the sealed pad ciphertext.
Message encrypted_sample_classical(std::uint64_t session, int num_bits);

Message eval_request(std::uint64_t session, std::uint64_t num_evals);

/// Per evaluation: one scalar w plus the updated key ciphertext.
Message eval_response(std::uint64_t session, std::uint64_t num_evals,
                      int num_qubits);

Message param_update(std::uint64_t session, std::uint64_t num_params);

Message kernel_request(std::uint64_t session, std::uint64_t num_pairs);

Message kernel_response(std::uint64_t session, std::uint64_t num_entries);

enum class CostVariant { Qhe, BlindBrickwork };

/// Declared constants of the modeled brickwork baseline.
struct BrickworkModel {
    std::uint64_t single_qubit_slots = 4;
    std::uint64_t cnot_slots = 8;
    std::uint64_t classical_bits_per_slot = 2; // angle out, outcome back

    void validate() const;
};

struct CostModel {
    CostVariant variant = CostVariant::Qhe;
    BrickworkModel brickwork;
};

/// Modeled cost of evaluating `gates` blindly: the circuit is packed
/// greedily onto per-wire slot counters, depth D = max counter, and the
/// client ships n qubits plus 2n classical bits per slot over D rounds.
Totals blind_baseline_cost(const std::vector<sim::GateOp> &gates, int num_qubits,
                           const BrickworkModel &model = {});

} // namespace qhel::protocol
