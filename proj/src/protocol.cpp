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

#include "qhel/protocol/transcript.hpp"

#include <algorithm>

#include <json.hpp>

#include "qhel/crypto/vault.hpp"

namespace qhel::protocol {

std::string direction_name(Direction dir) {
    return dir == Direction::ClientToServer ? "c2s" : "s2c";
}

std::string kind_name(MessageKind kind) {
    switch (kind) {
    case MessageKind::EncryptedSample: return "EncryptedSample";
    case MessageKind::EvalRequest: return "EvalRequest";
    case MessageKind::EvalResponse: return "EvalResponse";
    case MessageKind::ParamUpdate: return "ParamUpdate";
    case MessageKind::KernelRequest: return "KernelRequest";
    case MessageKind::KernelResponse: return "KernelResponse";
    }
    return "?";
}

bool client_sends(MessageKind kind) {
    return kind != MessageKind::EvalResponse && kind != MessageKind::KernelResponse;
}

void Transcript::append(Message msg) {
    const Direction expected = client_sends(msg.kind) ? Direction::ClientToServer
                                                      : Direction::ServerToClient;
    if (msg.direction != expected)
        throw TranscriptError(kind_name(msg.kind) + " flows " +
                              direction_name(expected) + ", got " +
                              direction_name(msg.direction));

    switch (msg.kind) {
    case MessageKind::EvalRequest:
        ++pending_eval_[msg.session];
        break;
    case MessageKind::KernelRequest:
        ++pending_kernel_[msg.session];
        break;
    case MessageKind::EvalResponse: {
        auto &pending = pending_eval_[msg.session];
        if (pending == 0)
            throw TranscriptError("EvalResponse without a pending EvalRequest in "
                                  "session " +
                                  std::to_string(msg.session));
        --pending;
        break;
    }
    case MessageKind::KernelResponse: {
        auto &pending = pending_kernel_[msg.session];
        if (pending == 0)
            throw TranscriptError("KernelResponse without a pending KernelRequest "
                                  "in session " +
                                  std::to_string(msg.session));
        --pending;
        break;
    }
    default:
        break;
    }

    if (!messages_.empty()) {
        const Direction prev = messages_.back().direction;
        if (prev == Direction::ServerToClient &&
            msg.direction == Direction::ClientToServer)
            ++trip_;
        if (prev == Direction::ClientToServer &&
            msg.direction == Direction::ServerToClient)
            ++cache_.rounds;
    }
    msg.round = trip_;

    cache_.qubits_sent += msg.qubits;
    cache_.classical_bits += msg.classical_bits;
    messages_.push_back(msg);
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto &msg : messages_) {
        const nlohmann::json line{{"dir", direction_name(msg.direction)},
                                  {"kind", kind_name(msg.kind)},
                                  {"qubits", msg.qubits},
                                  {"bits", msg.classical_bits},
                                  {"session", msg.session},
                                  {"round", msg.round}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

Totals account(const Transcript &transcript) {
    Totals fresh;
    const auto &messages = transcript.messages();
    for (std::size_t i = 0; i < messages.size(); ++i) {
        fresh.qubits_sent += messages[i].qubits;
        fresh.classical_bits += messages[i].classical_bits;
        if (i > 0 && messages[i - 1].direction == Direction::ClientToServer &&
            messages[i].direction == Direction::ServerToClient)
            ++fresh.rounds;
    }
    if (!(fresh == transcript.totals()))
        throw TranscriptError("cached totals diverge from the message list");
    return fresh;
}

namespace {
std::uint64_t key_ct_bits(int num_qubits) {
    return crypto::KeyCiphertext::wire_bits(2 * num_qubits);
}
} // namespace

Message encrypted_sample(std::uint64_t session, int num_qubits) {
    if (num_qubits < 1)
        throw DomainError("encrypted sample needs at least one qubit");
    Message msg;
    msg.kind = MessageKind::EncryptedSample;
    msg.qubits = static_cast<std::uint64_t>(num_qubits);
    msg.classical_bits = key_ct_bits(num_qubits);
    msg.session = session;
    return msg;
}

Message encrypted_sample_classical(std::uint64_t session, int num_bits) {
    if (num_bits < 1)
        throw DomainError("encrypted sample needs at least one bit");
    Message msg;
    msg.kind = MessageKind::EncryptedSample;
    msg.qubits = 0;
    msg.classical_bits = static_cast<std::uint64_t>(num_bits) + key_ct_bits(num_bits);
    msg.session = session;
    return msg;
}

Message eval_request(std::uint64_t session, std::uint64_t num_evals) {
    Message msg;
    msg.kind = MessageKind::EvalRequest;
    msg.classical_bits = kRequestHeaderBits + kEvalDescriptorBits * num_evals;
    msg.session = session;
    return msg;
}

Message eval_response(std::uint64_t session, std::uint64_t num_evals,
                      int num_qubits) {
    Message msg;
    msg.direction = Direction::ServerToClient;
    msg.kind = MessageKind::EvalResponse;
    msg.classical_bits = num_evals * (kScalarBits + key_ct_bits(num_qubits));
    msg.session = session;
    return msg;
}

Message param_update(std::uint64_t session, std::uint64_t num_params) {
    Message msg;
    msg.kind = MessageKind::ParamUpdate;
    msg.classical_bits = kRequestHeaderBits + kScalarBits * num_params;
    msg.session = session;
    return msg;
}

Message kernel_request(std::uint64_t session, std::uint64_t num_pairs) {
    Message msg;
    msg.kind = MessageKind::KernelRequest;
    msg.classical_bits = kRequestHeaderBits + kEvalDescriptorBits * num_pairs;
    msg.session = session;
    return msg;
}

Message kernel_response(std::uint64_t session, std::uint64_t num_entries) {
    Message msg;
    msg.direction = Direction::ServerToClient;
    msg.kind = MessageKind::KernelResponse;
    msg.classical_bits = kScalarBits * num_entries;
    msg.session = session;
    return msg;
}

void BrickworkModel::validate() const {
    if (single_qubit_slots == 0 || cnot_slots == 0 || classical_bits_per_slot == 0)
        throw ValidationError("brickwork model constants must be positive");
}

Totals blind_baseline_cost(const std::vector<sim::GateOp> &gates, int num_qubits,
                           const BrickworkModel &model) {
    model.validate();
    if (num_qubits < 1)
        throw DomainError("baseline cost needs at least one qubit");
    std::vector<std::uint64_t> slot(static_cast<std::size_t>(num_qubits), 0);
    const auto check_wire = [num_qubits](int q) {
        if (q < 0 || q >= num_qubits)
            throw DomainError("gate wire out of range for the baseline model");
    };
    for (const auto &gate : gates) {
        switch (gate.kind) {
        case sim::GateKind::Cnot: {
            check_wire(gate.control);
            check_wire(gate.target);
            const auto c = static_cast<std::size_t>(gate.control);
            const auto t = static_cast<std::size_t>(gate.target);
            const auto aligned = std::max(slot[c], slot[t]);
            slot[c] = slot[t] = aligned + model.cnot_slots;
            break;
        }
        case sim::GateKind::Perm: {
            const auto aligned = *std::max_element(slot.begin(), slot.end());
            for (auto &s : slot)
                s = aligned + model.cnot_slots;
            break;
        }
        default:
            check_wire(gate.target);
            slot[static_cast<std::size_t>(gate.target)] += model.single_qubit_slots;
            break;
        }
    }
    const std::uint64_t depth = *std::max_element(slot.begin(), slot.end());
    Totals totals;
    totals.qubits_sent = static_cast<std::uint64_t>(num_qubits) * depth;
    totals.classical_bits = static_cast<std::uint64_t>(num_qubits) * depth *
                            model.classical_bits_per_slot;
    totals.rounds = depth;
    return totals;
}

} // namespace qhel::protocol
