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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qhel/crypto/pad.hpp"
#include "qhel/crypto/vault.hpp"
#include "qhel/engine/engine.hpp"
#include "qhel/engine/server_view.hpp"
#include "qhel/sim/gates.hpp"
#include "qhel/sim/measure.hpp"
#include "qhel/sim/state_vector.hpp"
#include "test_util.hpp"

using namespace qhel;

namespace {

engine::ServerCircuit circuit_of(const std::vector<sim::GateOp> &gates) {
    engine::ServerCircuit c;
    for (const auto &g : gates)
        c.add(g);
    return c;
}

crypto::PadKey pad_of(std::uint64_t a_mask, std::uint64_t b_mask, int n) {
    return crypto::PadKey{common::uint_to_bits(a_mask, n),
                          common::uint_to_bits(b_mask, n)};
}

// Published per-gate key recurrence, written directly against the table so
// it stays independent of the library's circuit machinery.
crypto::PadKey recur(crypto::PadKey key, const sim::GateOp &g) {
    const auto t = static_cast<std::size_t>(g.target);
    switch (g.kind) {
    case sim::GateKind::H:
        std::swap(key.a[t], key.b[t]);
        break;
    case sim::GateKind::S:
    case sim::GateKind::T:
        key.a[t] = static_cast<std::uint8_t>(key.a[t] ^ key.b[t]);
        break;
    case sim::GateKind::Cnot: {
        const auto c = static_cast<std::size_t>(g.control);
        key.a[c] = static_cast<std::uint8_t>(key.a[c] ^ key.a[t]);
        key.b[t] = static_cast<std::uint8_t>(key.b[t] ^ key.b[c]);
        break;
    }
    default:
        break;
    }
    return key;
}

sim::StateVector plus_state() {
    return sim::apply(sim::basis_state(1, 0), sim::GateOp::h(0));
}

sim::StateVector ghz3() {
    sim::AmpVector amps = sim::AmpVector::Zero(8);
    amps[0] = amps[7] = 1.0;
    return sim::state_from_amplitudes(std::move(amps));
}

} // namespace

TEST_CASE("server circuits bind parameter slots by name") {
    engine::ServerCircuit c;
    c.add(sim::GateOp::h(0));
    c.add(sim::GateOp::rz(0, 0.0), "alpha");
    c.add(sim::GateOp::ry(1, 0.0), "beta");
    CHECK_FALSE(c.fully_bound());
    CHECK_THROWS_AS((void)c.bound_gates(), ValidationError);

    const auto bound = c.bind({{"alpha", 0.7}, {"beta", -0.2}});
    CHECK(bound.fully_bound());
    const auto gates = bound.bound_gates();
    REQUIRE(gates.size() == 3);
    CHECK(gates[1].theta == doctest::Approx(0.7));
    CHECK(gates[2].theta == doctest::Approx(-0.2));

    const auto partial = c.bind({{"alpha", 0.1}});
    CHECK_FALSE(partial.fully_bound());
    CHECK_THROWS_AS((void)c.bind({{"gamma", 1.0}}), ValidationError);
    CHECK_THROWS_AS(c.add(sim::GateOp::h(0), "slot"), ValidationError);
    CHECK_THROWS_AS(c.add(sim::GateOp::rz(0, 0.0), ""), ValidationError);
}

TEST_CASE("identity circuit leaves state and key ciphertext untouched") {
    common::Rng rng(101);
    const auto keypair = crypto::HEKeypair::create(rng);
    const auto psi = testutil::random_state(2, rng);
    const auto pad = crypto::gen_pad(2, rng);
    const auto es = engine::encrypt_state(psi, pad, keypair.handle(), rng, 9);

    const auto out =
        engine::homomorphic_apply(es, engine::ServerCircuit{}, keypair.handle(), rng);
    CHECK(out.key_ct == es.key_ct);
    CHECK((out.padded.amps - es.padded.amps).cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.session_id == 9);
    CHECK(sim::fidelity(engine::decrypt_state(out, keypair), psi) > 1.0 - 1e-12);
}

TEST_CASE("single padded hadamard decrypts to the plaintext hadamard") {
    common::Rng rng(103);
    const auto keypair = crypto::HEKeypair::create(rng);
    const auto es = engine::encrypt_state(sim::basis_state(1, 0), pad_of(0, 1, 1),
                                          keypair.handle(), rng);
    const auto out = engine::homomorphic_apply(
        es, circuit_of({sim::GateOp::h(0)}), keypair.handle(), rng);
    CHECK(sim::fidelity(engine::decrypt_state(out, keypair), plus_state()) >
          1.0 - 1e-10);
}

TEST_CASE("random encrypted circuits decrypt to their plaintext evaluation") {
    common::Rng rng(107);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng.index(5));
        const int depth = 1 + static_cast<int>(rng.index(20));
        const auto gates = testutil::random_circuit(n, depth, rng, true, true);
        const auto psi = testutil::random_state(n, rng);
        const auto pad = crypto::gen_pad(n, rng);

        const auto keypair = crypto::HEKeypair::create(rng);
        const auto es = engine::encrypt_state(psi, pad, keypair.handle(), rng);
        const auto out =
            engine::homomorphic_apply(es, circuit_of(gates), keypair.handle(), rng);

        const auto expect = sim::apply_all(psi, gates);
        CHECK(sim::fidelity(engine::decrypt_state(out, keypair), expect) >
              1.0 - 1e-9);
    }
}

TEST_CASE("homomorphic evaluation rejects foreign vaults and unbound slots") {
    common::Rng rng(109);
    const auto alice = crypto::HEKeypair::create(rng);
    const auto bob = crypto::HEKeypair::create(rng);
    const auto es = engine::encrypt_state(sim::basis_state(1, 0), pad_of(0, 0, 1),
                                          alice.handle(), rng);
    CHECK_THROWS_AS((void)engine::homomorphic_apply(es, engine::ServerCircuit{},
                                                    bob.handle(), rng),
                    WrongKeyError);

    engine::ServerCircuit c;
    c.add(sim::GateOp::rz(0, 0.0), "free");
    CHECK_THROWS_AS((void)engine::homomorphic_apply(es, c, alice.handle(), rng),
                    ValidationError);
}

TEST_CASE("rotation gadget realizes the requested angle on the plaintext") {
    common::Rng rng(113);
    const auto keypair = crypto::HEKeypair::create(rng);

    const auto psi = testutil::random_state(1, rng);
    const auto noop = engine::rotation_gadget(
        engine::encrypt_state(psi, pad_of(1, 1, 1), keypair.handle(), rng), 0, 0.0,
        keypair.handle());
    CHECK(sim::fidelity(engine::decrypt_state(noop, keypair), psi) > 1.0 - 1e-10);

    const auto plain_branch = engine::rotation_gadget(
        engine::encrypt_state(psi, pad_of(1, 0, 1), keypair.handle(), rng), 0, 0.8,
        keypair.handle());
    const auto naive = sim::apply(psi, sim::GateOp::rz(0, 0.8));
    CHECK(sim::fidelity(engine::decrypt_state(plain_branch, keypair), naive) >
          1.0 - 1e-10);

    const auto flipped = engine::rotation_gadget(
        engine::encrypt_state(plus_state(), pad_of(0, 1, 1), keypair.handle(), rng),
        0, M_PI / 2, keypair.handle());
    const auto wanted = sim::apply(plus_state(), sim::GateOp::rz(0, M_PI / 2));
    const auto wrong = sim::apply(plus_state(), sim::GateOp::rz(0, -M_PI / 2));
    const auto got = engine::decrypt_state(flipped, keypair);
    CHECK(sim::fidelity(got, wanted) > 1.0 - 1e-10);
    CHECK(sim::fidelity(got, wrong) < 1e-6);
}

TEST_CASE("t gadget corrects the residual phase on the flipped branch") {
    common::Rng rng(127);
    const auto keypair = crypto::HEKeypair::create(rng);

    const auto psi = testutil::random_state(1, rng);
    const auto direct = engine::t_gadget(
        engine::encrypt_state(psi, pad_of(1, 0, 1), keypair.handle(), rng), 0,
        keypair.handle());
    CHECK(sim::fidelity(engine::decrypt_state(direct, keypair),
                        sim::apply(psi, sim::GateOp::t(0))) > 1.0 - 1e-10);

    const auto flipped = engine::t_gadget(
        engine::encrypt_state(plus_state(), pad_of(0, 1, 1), keypair.handle(), rng),
        0, keypair.handle());
    CHECK(sim::fidelity(engine::decrypt_state(flipped, keypair),
                        sim::apply(plus_state(), sim::GateOp::t(0))) > 1.0 - 1e-10);

    for (std::uint64_t mask = 0; mask < 4; ++mask) {
        const auto pad = pad_of(mask >> 1, mask & 1, 1);
        auto es = engine::encrypt_state(psi, pad, keypair.handle(), rng);
        es = engine::t_gadget(es, 0, keypair.handle());
        es = engine::t_gadget(es, 0, keypair.handle());
        CHECK(sim::fidelity(engine::decrypt_state(es, keypair),
                            sim::apply(psi, sim::GateOp::s(0))) > 1.0 - 1e-10);
    }
}

TEST_CASE("permutation gadget permutes the plaintext under a fresh pad") {
    common::Rng rng(131);
    const auto keypair = crypto::HEKeypair::create(rng);

    std::vector<std::uint32_t> id8(8);
    for (std::uint32_t i = 0; i < 8; ++i)
        id8[i] = i;
    const auto psi = testutil::random_state(3, rng);
    const auto pad = crypto::gen_pad(3, rng);
    const auto es = engine::encrypt_state(psi, pad, keypair.handle(), rng);
    const auto same = engine::permutation_gadget(es, sim::GateOp::permutation(id8),
                                                 keypair.handle(), rng);
    CHECK(sim::fidelity(engine::decrypt_state(same, keypair), psi) > 1.0 - 1e-10);
    CHECK_FALSE(same.key_ct == es.key_ct);

    std::vector<std::uint32_t> mul3{0, 3, 6, 2, 5, 1, 4, 7};
    const auto two = engine::encrypt_state(sim::basis_state(3, 2), pad_of(0, 5, 3),
                                           keypair.handle(), rng);
    const auto six = engine::permutation_gadget(two, sim::GateOp::permutation(mul3),
                                                keypair.handle(), rng);
    CHECK(sim::fidelity(engine::decrypt_state(six, keypair), sim::basis_state(3, 6)) >
          1.0 - 1e-10);

    const auto phi = testutil::random_state(3, rng);
    const auto es_phi =
        engine::encrypt_state(phi, crypto::gen_pad(3, rng), keypair.handle(), rng);
    const auto g_psi = engine::permutation_gadget(es, sim::GateOp::permutation(mul3),
                                                  keypair.handle(), rng);
    const auto g_phi = engine::permutation_gadget(es_phi, sim::GateOp::permutation(mul3),
                                                  keypair.handle(), rng);
    const auto before = std::abs(sim::inner_product(psi, phi));
    const auto after = std::abs(sim::inner_product(engine::decrypt_state(g_psi, keypair),
                                                   engine::decrypt_state(g_phi, keypair)));
    CHECK(after == doctest::Approx(before).epsilon(1e-9));

    CHECK_THROWS_AS((void)engine::permutation_gadget(es, sim::GateOp::x(0),
                                                     keypair.handle(), rng),
                    UnsupportedGateError);
    CHECK_THROWS_AS((void)sim::GateOp::permutation({0, 0, 1, 3, 4, 5, 6, 7}),
                    ValidationError);
}

TEST_CASE("measured expectations carry the sign of the x mask") {
    common::Rng rng(137);
    const auto keypair = crypto::HEKeypair::create(rng);

    const auto masked = engine::encrypted_expectation_z(
        engine::encrypt_state(sim::basis_state(1, 0), pad_of(0, 1, 1),
                              keypair.handle(), rng),
        0, 0, rng);
    CHECK(masked.w == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(engine::decrypt_expectation(masked, keypair) ==
          doctest::Approx(1.0).epsilon(1e-12));

    for (std::uint64_t mask = 0; mask < 4; ++mask) {
        const auto es = engine::encrypt_state(plus_state(), pad_of(mask >> 1, mask & 1, 1),
                                              keypair.handle(), rng);
        const auto ex = engine::encrypted_expectation_z(es, 0, 0, rng);
        CHECK(std::abs(ex.w) < 1e-12);
    }

    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3;
        const auto gates = testutil::random_circuit(n, 12, rng, true, true);
        const auto psi = sim::apply_all(sim::basis_state(n, 0), gates);
        const int k = static_cast<int>(rng.index(n));
        const double expect = sim::expectation(psi, {k});
        for (std::uint64_t bflip = 0; bflip < 2; ++bflip) {
            auto b = common::uint_to_bits(rng.u64() & 0x3, n);
            b[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(bflip);
            const crypto::PadKey pad{common::uint_to_bits(rng.u64() & 0x7, n), b};
            const auto es = engine::encrypt_state(psi, pad, keypair.handle(), rng);
            const auto ex = engine::encrypted_expectation_z(es, k, 0, rng);
            CHECK(std::abs(ex.w) <= 1.0 + 1e-12);
            const double sign = bflip ? -1.0 : 1.0;
            CHECK(ex.w == doctest::Approx(sign * expect).epsilon(1e-10));
            CHECK(engine::decrypt_expectation(ex, keypair) ==
                  doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("shot-sampled expectations converge to the exact value") {
    common::Rng rng(139);
    const auto keypair = crypto::HEKeypair::create(rng);
    const auto psi = sim::apply(sim::basis_state(1, 0), sim::GateOp::ry(0, 1.1));
    const auto es =
        engine::encrypt_state(psi, pad_of(1, 1, 1), keypair.handle(), rng);
    const auto ex = engine::encrypted_expectation_z(es, 0, 1000000, rng);
    CHECK(std::abs(ex.w) <= 1.0);
    CHECK(ex.shots == 1000000);
    const double exact = std::cos(1.1);
    CHECK(std::abs(engine::decrypt_expectation(ex, keypair) - exact) < 5e-3);
}

TEST_CASE("key ciphertext tracks the plaintext recurrence gate by gate") {
    common::Rng rng(149);
    const auto keypair = crypto::HEKeypair::create(rng);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(3));
        const auto gates = testutil::random_circuit(n, 15, rng, true, true);
        const auto psi = testutil::random_state(n, rng);
        auto pad = crypto::gen_pad(n, rng);
        auto es = engine::encrypt_state(psi, pad, keypair.handle(), rng);
        auto plain = psi;
        for (const auto &gate : gates) {
            es = engine::homomorphic_apply(es, circuit_of({gate}), keypair.handle(),
                                           rng);
            pad = recur(std::move(pad), gate);
            plain = sim::apply(plain, gate);
            CHECK(crypto::PadKey::from_bits(keypair.decrypt(es.key_ct)) == pad);
            CHECK(sim::fidelity(engine::decrypt_state(es, keypair), plain) >
                  1.0 - 1e-9);
        }
    }
}

TEST_CASE("pad averaging mixes fully only when both masks are present") {
    common::Rng rng(151);
    CHECK(engine::audit_mixedness(testutil::random_state(1, rng)) < 1e-10);
    CHECK(engine::audit_mixedness(ghz3()) < 1e-10);

    const auto zero = sim::basis_state(1, 0);
    CHECK(engine::audit_mixedness(zero, engine::TwirlKind::ZOnly) > 1e-3);
    CHECK(engine::audit_mixedness(plus_state(), engine::TwirlKind::XOnly) > 1e-3);

    // The complementary pairings are the eigenbasis cases where a partial
    // twirl already suffices; they show the demonstration above is sharp.
    CHECK(engine::audit_mixedness(plus_state(), engine::TwirlKind::ZOnly) < 1e-10);
    CHECK(engine::audit_mixedness(zero, engine::TwirlKind::XOnly) < 1e-10);

    CHECK_THROWS_AS((void)engine::audit_mixedness(testutil::random_state(4, rng)),
                    ResourceError);
}

TEST_CASE("server view audit passes honest sessions and catches leaks") {
    common::Rng rng(157);
    const auto keypair = crypto::HEKeypair::create(rng);
    const int n = 8; // 16 key bits, enough for the raw-pattern scan
    const auto sample_bits = common::uint_to_bits(0xB5, n);
    auto plain = sim::basis_state(n, common::bits_to_uint(sample_bits));
    const auto pad = crypto::gen_pad(n, rng);

    engine::ServerViewLog log;
    auto es = engine::encrypt_state(plain, pad, keypair.handle(), rng, 1);
    engine::ServerCircuit circuit;
    circuit.add(sim::GateOp::h(0));
    circuit.add(sim::GateOp::cnot(0, 1));
    circuit.add(sim::GateOp::t(1));
    circuit.add(sim::GateOp::rz(2, 0.4), "w0");
    circuit.add(sim::GateOp::ry(3, 0.0), "w1");
    es = engine::homomorphic_apply(es, circuit.bind({{"w0", 0.9}, {"w1", -0.5}}),
                                   keypair.handle(), rng, &log);
    (void)engine::encrypted_expectation_z(es, 0, 0, rng, &log);
    CHECK(log.size() > 5);

    engine::ServerSecrets secrets;
    secrets.pads.push_back(pad);
    secrets.samples.push_back(sample_bits);
    const auto honest = engine::audit_server_view(log, secrets);
    CHECK(honest.pass);
    CHECK(honest.findings.empty());

    engine::ServerViewLog leaky = log;
    leaky.record("debug", {{"note", engine::pad_needle(pad)}});
    const auto caught = engine::audit_server_view(leaky, secrets);
    CHECK_FALSE(caught.pass);
    REQUIRE(caught.findings.size() == 1);

    engine::ServerViewLog raw_leak = log;
    raw_leak.record("debug", {{"bits", common::bits_to_string(pad.to_bits())}});
    CHECK_FALSE(engine::audit_server_view(raw_leak, secrets).pass);

    engine::ServerViewLog sample_leak = log;
    sample_leak.record("debug", {{"x", engine::sample_needle(sample_bits)}});
    CHECK_FALSE(engine::audit_server_view(sample_leak, secrets).pass);

    const auto jsonl = log.to_jsonl();
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') ==
          static_cast<std::ptrdiff_t>(log.size()));
}

TEST_CASE("expectation decryption validates the measured qubit") {
    common::Rng rng(163);
    const auto keypair = crypto::HEKeypair::create(rng);
    const auto es = engine::encrypt_state(sim::basis_state(2, 0), pad_of(0, 0, 2),
                                          keypair.handle(), rng);
    auto ex = engine::encrypted_expectation_z(es, 1, 0, rng);
    ex.k = 5;
    CHECK_THROWS_AS((void)engine::decrypt_expectation(ex, keypair), DomainError);
}
