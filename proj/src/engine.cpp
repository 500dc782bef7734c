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

#include "qhel/engine/engine.hpp"
#include "qhel/engine/server_view.hpp"

#include <set>
#include <utility>

#include "qhel/crypto/key_update.hpp"
#include "qhel/crypto/sealed_port.hpp"

namespace qhel::engine {

void ServerViewLog::record(const std::string &kind, nlohmann::json payload) {
    payload["kind"] = kind;
    lines_.push_back(payload.dump());
}

std::string ServerViewLog::to_jsonl() const {
    std::string out;
    for (const auto &line : lines_) {
        out += line;
        out += '\n';
    }
    return out;
}

std::string pad_needle(const crypto::PadKey &key) {
    return "pad{a=" + common::bits_to_string(key.a) +
           ",b=" + common::bits_to_string(key.b) + "}";
}

std::string sample_needle(const common::Bits &bits) {
    return "sample{" + common::bits_to_string(bits) + "}";
}

namespace {
constexpr std::size_t kRawNeedleBits = 16;
}

AuditReport audit_server_view(const ServerViewLog &log, const ServerSecrets &secrets) {
    std::vector<std::pair<std::string, std::string>> needles;
    for (std::size_t i = 0; i < secrets.pads.size(); ++i) {
        const auto &pad = secrets.pads[i];
        needles.emplace_back("pad " + std::to_string(i) + " render", pad_needle(pad));
        const auto raw = common::bits_to_string(pad.to_bits());
        if (raw.size() >= kRawNeedleBits)
            needles.emplace_back("pad " + std::to_string(i) + " raw bits", raw);
    }
    for (std::size_t i = 0; i < secrets.samples.size(); ++i) {
        const auto &bits = secrets.samples[i];
        needles.emplace_back("sample " + std::to_string(i) + " render",
                             sample_needle(bits));
        const auto raw = common::bits_to_string(bits);
        if (raw.size() >= kRawNeedleBits)
            needles.emplace_back("sample " + std::to_string(i) + " raw bits", raw);
    }

    AuditReport report;
    for (std::size_t li = 0; li < log.lines().size(); ++li) {
        const auto &line = log.lines()[li];
        for (const auto &[what, pattern] : needles)
            if (line.find(pattern) != std::string::npos)
                report.findings.push_back("line " + std::to_string(li) +
                                          " leaks " + what);
    }
    report.pass = report.findings.empty();
    return report;
}

void ServerCircuit::add(sim::GateOp gate) { entries_.push_back({std::move(gate), {}}); }

void ServerCircuit::add(sim::GateOp gate, std::string slot) {
    if (gate.kind != sim::GateKind::Rz && gate.kind != sim::GateKind::Ry)
        throw ValidationError("parameter slots attach to rotation gates only");
    if (slot.empty())
        throw ValidationError("parameter slot name must be non-empty");
    entries_.push_back({std::move(gate), std::move(slot)});
}

ServerCircuit ServerCircuit::bind(const std::map<std::string, double> &values) const {
    ServerCircuit out = *this;
    std::set<std::string> used;
    for (auto &entry : out.entries_) {
        if (entry.slot.empty())
            continue;
        const auto it = values.find(entry.slot);
        if (it != values.end()) {
            entry.gate.theta = it->second;
            used.insert(entry.slot);
            entry.slot.clear();
        }
    }
    for (const auto &[name, value] : values) {
        (void)value;
        if (!used.contains(name))
            throw ValidationError("bind names an unknown parameter slot: " + name);
    }
    return out;
}

std::vector<sim::GateOp> ServerCircuit::bound_gates() const {
    std::vector<sim::GateOp> gates;
    gates.reserve(entries_.size());
    for (const auto &entry : entries_) {
        if (!entry.slot.empty())
            throw ValidationError("parameter slot is unbound: " + entry.slot);
        gates.push_back(entry.gate);
    }
    return gates;
}

bool ServerCircuit::fully_bound() const {
    for (const auto &entry : entries_)
        if (!entry.slot.empty())
            return false;
    return true;
}

EncryptedState encrypt_state(const sim::StateVector &plain, const crypto::PadKey &pad,
                             const crypto::EvalHandle &handle, common::Rng &rng,
                             std::uint64_t session_id) {
    return {crypto::qotp_encrypt(plain, pad), handle.encrypt(pad.to_bits(), rng),
            session_id};
}

sim::StateVector decrypt_state(const EncryptedState &es,
                               const crypto::HEKeypair &keypair) {
    const auto pad = crypto::PadKey::from_bits(keypair.decrypt(es.key_ct));
    return crypto::qotp_decrypt(es.padded, pad);
}

double decrypt_expectation(const EncryptedExpectation &ex,
                           const crypto::HEKeypair &keypair) {
    const auto bits = keypair.decrypt(ex.key_ct_out);
    const auto n = bits.size() / 2;
    if (ex.k < 0 || static_cast<std::size_t>(ex.k) >= n)
        throw DomainError("measured qubit is outside the key register");
    return bits[n + static_cast<std::size_t>(ex.k)] ? -ex.w : ex.w;
}

namespace {

void check_vault(const EncryptedState &es, const crypto::EvalHandle &handle) {
    if (es.key_ct.vault_id() != handle.vault_id())
        throw WrongKeyError("encrypted state is bound to a different vault");
}

void log_gate(ServerViewLog *log, const char *kind, const sim::GateOp &gate,
              const EncryptedState &out) {
    if (!log)
        return;
    nlohmann::json entry{{"gate", sim::gate_name(gate.kind)},
                         {"target", gate.target},
                         {"key_ct", out.key_ct.hex()}};
    if (gate.kind == sim::GateKind::Cnot)
        entry["control"] = gate.control;
    if (gate.kind == sim::GateKind::Rz || gate.kind == sim::GateKind::Ry)
        entry["theta"] = gate.theta;
    log->record(kind, std::move(entry));
}

std::vector<sim::GateOp> ry_rewrite(const sim::GateOp &gate) {
    const int j = gate.target;
    return {sim::GateOp::z(j),  sim::GateOp::s(j),
            sim::GateOp::h(j),  sim::GateOp::rz(j, gate.theta),
            sim::GateOp::h(j),  sim::GateOp::s(j)};
}

EncryptedState apply_one(const EncryptedState &es, const sim::GateOp &gate,
                         const crypto::EvalHandle &handle, common::Rng &rng,
                         ServerViewLog *log) {
    switch (gate.kind) {
    case sim::GateKind::Rz:
        return rotation_gadget(es, gate.target, gate.theta, handle, log);
    case sim::GateKind::T:
        return t_gadget(es, gate.target, handle, log);
    case sim::GateKind::Perm:
        return permutation_gadget(es, gate, handle, rng, log);
    case sim::GateKind::Ry: {
        log_gate(log, "rewrite", gate, es);
        EncryptedState cur = es;
        for (const auto &sub : ry_rewrite(gate))
            cur = apply_one(cur, sub, handle, rng, log);
        return cur;
    }
    default: {
        const auto rule = crypto::key_update_rule(gate, es.padded.num_qubits);
        EncryptedState out = es;
        out.padded = sim::apply(es.padded, gate);
        out.key_ct = handle.eval(es.key_ct, rule.circuit);
        log_gate(log, "gate", gate, out);
        return out;
    }
    }
}

} // namespace

EncryptedState homomorphic_apply(const EncryptedState &es, const ServerCircuit &circuit,
                                 const crypto::EvalHandle &handle, common::Rng &rng,
                                 ServerViewLog *log) {
    check_vault(es, handle);
    const auto gates = circuit.bound_gates();
    if (log)
        log->record("circuit", {{"session", es.session_id},
                                {"qubits", es.padded.num_qubits},
                                {"gates", gates.size()},
                                {"key_ct", es.key_ct.hex()}});
    EncryptedState cur = es;
    for (const auto &gate : gates)
        cur = apply_one(cur, gate, handle, rng, log);
    return cur;
}

EncryptedState rotation_gadget(const EncryptedState &es, int j, double theta,
                               const crypto::EvalHandle &handle, ServerViewLog *log) {
    check_vault(es, handle);
    const sim::GateOp gate = sim::GateOp::rz(j, theta);
    const auto rule = crypto::key_update_rule(gate, es.padded.num_qubits);
    // Interior of the sealed unit; the sign of the physical angle stays here.
    const auto key_bits = crypto::sealed::gadget_key_view(handle, es.key_ct);
    const bool flip =
        key_bits[static_cast<std::size_t>(es.padded.num_qubits + j)] != 0;
    EncryptedState out = es;
    out.padded = sim::apply(es.padded, sim::GateOp::rz(j, flip ? -theta : theta));
    out.key_ct = handle.eval(es.key_ct, rule.circuit);
    log_gate(log, "gadget", gate, out);
    return out;
}

EncryptedState t_gadget(const EncryptedState &es, int j,
                        const crypto::EvalHandle &handle, ServerViewLog *log) {
    check_vault(es, handle);
    const sim::GateOp gate = sim::GateOp::t(j);
    const auto rule = crypto::key_update_rule(gate, es.padded.num_qubits);
    const auto key_bits = crypto::sealed::gadget_key_view(handle, es.key_ct);
    EncryptedState out = es;
    out.padded = sim::apply(es.padded, gate);
    if (key_bits[static_cast<std::size_t>(es.padded.num_qubits + j)])
        out.padded = sim::apply(out.padded, sim::GateOp::s(j));
    out.key_ct = handle.eval(es.key_ct, rule.circuit);
    log_gate(log, "gadget", gate, out);
    return out;
}

EncryptedState permutation_gadget(const EncryptedState &es, const sim::GateOp &perm,
                                  const crypto::EvalHandle &handle, common::Rng &rng,
                                  ServerViewLog *log) {
    check_vault(es, handle);
    if (perm.kind != sim::GateKind::Perm)
        throw UnsupportedGateError("permutation gadget takes a permutation gate");
    const auto key_bits = crypto::sealed::gadget_key_view(handle, es.key_ct);
    const auto pad = crypto::PadKey::from_bits(key_bits);
    const auto plain = crypto::qotp_decrypt(es.padded, pad);
    const auto permuted = sim::apply(plain, perm);
    const auto fresh = crypto::gen_pad(es.padded.num_qubits, rng);
    EncryptedState out;
    out.padded = crypto::qotp_encrypt(permuted, fresh);
    out.key_ct = handle.encrypt(fresh.to_bits(), rng);
    out.session_id = es.session_id;
    if (log)
        log->record("gadget", {{"gate", "perm"},
                               {"dim", perm.perm->dim()},
                               {"key_ct", out.key_ct.hex()}});
    return out;
}

EncryptedExpectation encrypted_expectation_z(const EncryptedState &es, int k,
                                             std::uint64_t shots, common::Rng &rng,
                                             ServerViewLog *log) {
    const double w = shots == 0 ? sim::expectation(es.padded, {k})
                                : sim::sample_z(es.padded, k, shots, rng);
    const EncryptedExpectation ex{w, es.key_ct, k, shots};
    if (log)
        log->record("measure", {{"k", k},
                                {"shots", shots},
                                {"w", w},
                                {"key_ct", es.key_ct.hex()}});
    return ex;
}

double audit_mixedness(const sim::StateVector &psi, TwirlKind kind) {
    const int n = psi.num_qubits;
    if (n > 3)
        throw ResourceError("mixedness audit enumerates all pads; capped at 3 qubits");
    const Eigen::Index d = psi.dim();
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(d, d);
    const std::uint64_t masks = 1ull << n;
    std::uint64_t count = 0;
    for (std::uint64_t a = 0; a < masks; ++a) {
        if (kind == TwirlKind::XOnly && a != 0)
            continue;
        for (std::uint64_t b = 0; b < masks; ++b) {
            if (kind == TwirlKind::ZOnly && b != 0)
                continue;
            const crypto::PadKey key{common::uint_to_bits(a, n),
                                     common::uint_to_bits(b, n)};
            const auto enc = crypto::qotp_encrypt(psi, key);
            avg += enc.amps * enc.amps.adjoint();
            ++count;
        }
    }
    avg /= static_cast<double>(count);
    const Eigen::MatrixXcd target =
        Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    return (avg - target).cwiseAbs().maxCoeff();
}

} // namespace qhel::engine
