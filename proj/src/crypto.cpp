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

#include "qhel/crypto/key_update.hpp"
#include "qhel/crypto/pad.hpp"
#include "qhel/crypto/sealed_port.hpp"
#include "qhel/crypto/vault.hpp"

#include <string>
#include <utility>

namespace qhel::crypto {

PadKey PadKey::from_bits(const common::Bits &bits) {
    if (bits.size() % 2 != 0)
        throw DomainError("pad register length must be even (a bits then b bits)");
    const auto n = static_cast<std::ptrdiff_t>(bits.size() / 2);
    PadKey key;
    key.a.assign(bits.begin(), bits.begin() + n);
    key.b.assign(bits.begin() + n, bits.end());
    return key;
}

PadKey gen_pad(int num_qubits, common::Rng &rng) {
    if (num_qubits < 1)
        throw DomainError("pad needs at least one qubit");
    PadKey key;
    key.a.resize(static_cast<std::size_t>(num_qubits));
    key.b.resize(static_cast<std::size_t>(num_qubits));
    for (auto &bit : key.a)
        bit = rng.bit();
    for (auto &bit : key.b)
        bit = rng.bit();
    return key;
}

namespace {

void check_pad_match(const sim::StateVector &state, const PadKey &key) {
    if (key.num_qubits() != state.num_qubits ||
        key.a.size() != key.b.size())
        throw DomainError("pad length does not match the qubit count");
}

} // namespace

sim::StateVector qotp_encrypt(const sim::StateVector &state, const PadKey &key) {
    check_pad_match(state, key);
    sim::StateVector out = state;
    for (int q = 0; q < state.num_qubits; ++q)
        if (key.b[static_cast<std::size_t>(q)])
            out = sim::apply(out, sim::GateOp::x(q));
    for (int q = 0; q < state.num_qubits; ++q)
        if (key.a[static_cast<std::size_t>(q)])
            out = sim::apply(out, sim::GateOp::z(q));
    return out;
}

sim::StateVector qotp_decrypt(const sim::StateVector &state, const PadKey &key) {
    check_pad_match(state, key);
    sim::StateVector out = state;
    for (int q = 0; q < state.num_qubits; ++q)
        if (key.a[static_cast<std::size_t>(q)])
            out = sim::apply(out, sim::GateOp::z(q));
    for (int q = 0; q < state.num_qubits; ++q)
        if (key.b[static_cast<std::size_t>(q)])
            out = sim::apply(out, sim::GateOp::x(q));
    return out;
}

common::Bits classical_otp(const common::Bits &x, const PadKey &key) {
    if (x.size() != key.b.size())
        throw DomainError("bitstring length does not match the pad length");
    return common::xor_bits(x, key.b);
}

void KeyUpdateCircuit::validate() const {
    if (num_bits < 0)
        throw ValidationError("key register width must be non-negative");
    int width = num_bits;
    for (const auto &op : ops) {
        const auto in_range = [width](int r) { return r >= 0 && r < width; };
        const bool needs_src = op.kind != KeyOpKind::Not;
        if (!in_range(op.dst) || (needs_src && !in_range(op.src)))
            throw ValidationError("key op references a register out of range");
        if (op.kind == KeyOpKind::AndFresh)
            ++width;
    }
}

std::string KeyUpdateCircuit::signature() const {
    std::string sig = "kb" + std::to_string(num_bits);
    for (const auto &op : ops) {
        switch (op.kind) {
        case KeyOpKind::Swap:
            sig += ";sw" + std::to_string(op.dst) + "," + std::to_string(op.src);
            break;
        case KeyOpKind::XorInto:
            sig += ";xr" + std::to_string(op.dst) + "," + std::to_string(op.src);
            break;
        case KeyOpKind::Not:
            sig += ";nt" + std::to_string(op.dst);
            break;
        case KeyOpKind::AndFresh:
            sig += ";af" + std::to_string(op.dst) + "," + std::to_string(op.src);
            break;
        }
    }
    return sig;
}

common::Bits eval_key_circuit(const KeyUpdateCircuit &circuit, common::Bits reg) {
    circuit.validate();
    if (static_cast<int>(reg.size()) != circuit.num_bits)
        throw ValidationError("key register width does not match the circuit");
    for (const auto &op : circuit.ops) {
        const auto dst = static_cast<std::size_t>(op.dst);
        const auto src = static_cast<std::size_t>(op.src);
        switch (op.kind) {
        case KeyOpKind::Swap:
            std::swap(reg[dst], reg[src]);
            break;
        case KeyOpKind::XorInto:
            reg[dst] = static_cast<std::uint8_t>((reg[dst] ^ reg[src]) & 1u);
            break;
        case KeyOpKind::Not:
            reg[dst] = static_cast<std::uint8_t>((reg[dst] ^ 1u) & 1u);
            break;
        case KeyOpKind::AndFresh:
            reg.push_back(static_cast<std::uint8_t>(reg[dst] & reg[src] & 1u));
            break;
        }
    }
    return reg;
}

KeyUpdateRule key_update_rule(const sim::GateOp &gate, int num_qubits) {
    if (num_qubits < 1)
        throw DomainError("key register needs at least one qubit");
    const auto check_qubit = [num_qubits](int q) {
        if (q < 0 || q >= num_qubits)
            throw DomainError("gate qubit out of range for the key register");
    };
    const auto a_bit = [](int q) { return q; };
    const auto b_bit = [num_qubits](int q) { return num_qubits + q; };

    KeyUpdateRule rule;
    rule.circuit.num_bits = 2 * num_qubits;
    switch (gate.kind) {
    case sim::GateKind::X:
    case sim::GateKind::Z:
        check_qubit(gate.target);
        break;
    case sim::GateKind::H:
        check_qubit(gate.target);
        rule.circuit.ops.push_back(
            {KeyOpKind::Swap, a_bit(gate.target), b_bit(gate.target)});
        break;
    case sim::GateKind::S:
        check_qubit(gate.target);
        rule.circuit.ops.push_back(
            {KeyOpKind::XorInto, a_bit(gate.target), b_bit(gate.target)});
        break;
    case sim::GateKind::Cnot:
        check_qubit(gate.control);
        check_qubit(gate.target);
        if (gate.control == gate.target)
            throw DomainError("cnot control and target must differ");
        rule.circuit.ops.push_back(
            {KeyOpKind::XorInto, a_bit(gate.control), a_bit(gate.target)});
        rule.circuit.ops.push_back(
            {KeyOpKind::XorInto, b_bit(gate.target), b_bit(gate.control)});
        break;
    case sim::GateKind::T:
        check_qubit(gate.target);
        rule.circuit.ops.push_back(
            {KeyOpKind::XorInto, a_bit(gate.target), b_bit(gate.target)});
        rule.residual = ResidualKind::SCorrection;
        rule.residual_qubit = gate.target;
        break;
    case sim::GateKind::Rz:
        check_qubit(gate.target);
        rule.residual = ResidualKind::RzSignFlip;
        rule.residual_qubit = gate.target;
        break;
    case sim::GateKind::Ry:
        throw UnsupportedGateError(
            "no key rule for Ry; rewrite it into Clifford and Rz gates first");
    case sim::GateKind::Perm:
        throw UnsupportedGateError(
            "no key rule for register permutations; served by a sealed gadget");
    }
    return rule;
}

namespace detail {

/// Shared secret material of one vault. Both sides of a keypair reference
/// the same core; what separates them is the member surface on top of it.
struct VaultCore {
    std::uint64_t vault_id = 0;
    std::uint64_t wire_key = 0;
};

} // namespace detail

namespace {

std::vector<std::uint8_t> pack_bits(const common::Bits &bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        bytes[i / 8] |= static_cast<std::uint8_t>((bits[i] & 1u) << (i % 8));
    return bytes;
}

common::Bits unpack_bits(const std::vector<std::uint8_t> &bytes, int num_bits) {
    common::Bits bits(static_cast<std::size_t>(num_bits));
    for (int i = 0; i < num_bits; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        bits[idx] = static_cast<std::uint8_t>((bytes[idx / 8] >> (idx % 8)) & 1u);
    }
    return bits;
}

void apply_keystream(std::vector<std::uint8_t> &bytes, std::uint64_t wire_key,
                     std::uint64_t nonce) {
    std::uint64_t state = wire_key ^ nonce;
    std::size_t i = 0;
    while (i < bytes.size()) {
        const std::uint64_t block = common::splitmix64(state);
        for (int k = 0; k < 8 && i < bytes.size(); ++k, ++i)
            bytes[i] ^= static_cast<std::uint8_t>(block >> (8 * k));
    }
}

void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::vector<std::uint8_t> &in, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(in[off + static_cast<std::size_t>(i)])
             << (8 * i);
    return v;
}

constexpr std::size_t kWireHeaderBytes = 18; // vault id + nonce + bit count

common::Bits open_payload(const detail::VaultCore &core, std::uint64_t nonce,
                          const std::vector<std::uint8_t> &masked, int num_bits) {
    std::vector<std::uint8_t> payload = masked;
    apply_keystream(payload, core.wire_key, nonce);
    return unpack_bits(payload, num_bits);
}

} // namespace

std::vector<std::uint8_t> KeyCiphertext::serialize() const {
    std::vector<std::uint8_t> wire;
    wire.reserve(kWireHeaderBytes + masked_.size());
    put_u64(wire, vault_id_);
    put_u64(wire, nonce_);
    wire.push_back(static_cast<std::uint8_t>(num_bits_ & 0xff));
    wire.push_back(static_cast<std::uint8_t>((num_bits_ >> 8) & 0xff));
    wire.insert(wire.end(), masked_.begin(), masked_.end());
    return wire;
}

KeyCiphertext KeyCiphertext::deserialize(const std::vector<std::uint8_t> &wire) {
    if (wire.size() < kWireHeaderBytes)
        throw ValidationError("key ciphertext wire form is shorter than its header");
    KeyCiphertext ct;
    ct.vault_id_ = get_u64(wire, 0);
    ct.nonce_ = get_u64(wire, 8);
    ct.num_bits_ = static_cast<int>(wire[16]) | (static_cast<int>(wire[17]) << 8);
    const std::size_t payload =
        (static_cast<std::size_t>(ct.num_bits_) + 7) / 8;
    if (wire.size() != kWireHeaderBytes + payload)
        throw ValidationError("key ciphertext payload length disagrees with its bit count");
    ct.masked_.assign(wire.begin() + static_cast<std::ptrdiff_t>(kWireHeaderBytes),
                      wire.end());
    return ct;
}

std::size_t KeyCiphertext::wire_bits(int num_key_bits) {
    if (num_key_bits < 0)
        throw DomainError("key register width must be non-negative");
    return 8 * (kWireHeaderBytes + (static_cast<std::size_t>(num_key_bits) + 7) / 8);
}

EvalHandle::EvalHandle(std::shared_ptr<const detail::VaultCore> core)
    : core_(std::move(core)) {}

std::uint64_t EvalHandle::vault_id() const { return core_->vault_id; }

KeyCiphertext EvalHandle::encrypt(const common::Bits &bits, common::Rng &rng) const {
    if (bits.size() > 0xffff)
        throw ResourceError("key register too large for the ciphertext wire format");
    KeyCiphertext ct;
    ct.vault_id_ = core_->vault_id;
    ct.nonce_ = rng.u64();
    ct.num_bits_ = static_cast<int>(bits.size());
    ct.masked_ = pack_bits(bits);
    apply_keystream(ct.masked_, core_->wire_key, ct.nonce_);
    return ct;
}

KeyCiphertext EvalHandle::eval(const KeyCiphertext &ct,
                               const KeyUpdateCircuit &circuit) const {
    if (ct.vault_id() != core_->vault_id)
        throw WrongKeyError("ciphertext is bound to a different vault");
    circuit.validate();
    if (circuit.num_bits != ct.num_bits())
        throw ValidationError("circuit width does not match the ciphertext register");
    common::Bits reg = open_payload(*core_, ct.nonce_, ct.masked_, ct.num_bits_);
    reg = eval_key_circuit(circuit, std::move(reg));

    KeyCiphertext out;
    out.vault_id_ = core_->vault_id;
    std::uint64_t chain = ct.nonce_ ^ common::fnv1a(circuit.signature());
    out.nonce_ = common::splitmix64(chain);
    out.num_bits_ = static_cast<int>(reg.size());
    out.masked_ = pack_bits(reg);
    apply_keystream(out.masked_, core_->wire_key, out.nonce_);
    return out;
}

HEKeypair::HEKeypair(std::shared_ptr<const detail::VaultCore> core)
    : core_(std::move(core)) {}

HEKeypair HEKeypair::create(common::Rng &rng) {
    auto core = std::make_shared<detail::VaultCore>();
    core->vault_id = rng.u64();
    core->wire_key = rng.u64();
    return HEKeypair(std::move(core));
}

std::uint64_t HEKeypair::vault_id() const { return core_->vault_id; }

EvalHandle HEKeypair::handle() const { return EvalHandle(core_); }

common::Bits HEKeypair::decrypt(const KeyCiphertext &ct) const {
    if (ct.vault_id() != core_->vault_id)
        throw WrongKeyError("ciphertext is bound to a different vault");
    return open_payload(*core_, ct.nonce_, ct.masked_, ct.num_bits_);
}

namespace sealed {

common::Bits gadget_key_view(const EvalHandle &handle, const KeyCiphertext &ct) {
    if (ct.vault_id() != handle.core_->vault_id)
        throw WrongKeyError("ciphertext is bound to a different vault");
    return open_payload(*handle.core_, ct.nonce_, ct.masked_, ct.num_bits_);
}

} // namespace sealed

} // namespace qhel::crypto
