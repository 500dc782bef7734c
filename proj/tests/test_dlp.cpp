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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qhel/dlp/dlp.hpp"
#include "qhel/sim/measure.hpp"

using namespace qhel;
using dlp::Concept;
using dlp::DlpGroup;
using dlp::FeatureConfig;

namespace {

std::vector<std::uint32_t> shuffled_units(std::uint32_t p, common::Rng &rng) {
    std::vector<std::uint32_t> units(p - 1);
    std::iota(units.begin(), units.end(), 1u);
    for (std::size_t i = units.size(); i > 1; --i)
        std::swap(units[i - 1], units[rng.index(i)]);
    return units;
}

} // namespace

TEST_CASE("generators are found smallest-first") {
    CHECK(dlp::find_generator(7) == 3);
    CHECK(dlp::find_generator(5) == 2);
    CHECK(dlp::find_generator(127) == 3);
    CHECK(dlp::find_generator(2) == 1);
    CHECK_THROWS_AS(dlp::find_generator(4), DomainError);
    CHECK_THROWS_AS(dlp::find_generator(1), DomainError);
    CHECK_THROWS_AS(dlp::find_generator((1u << 16) + 1), ResourceError);

    const auto group = DlpGroup::create(127);
    CHECK(group.a == 3);
    CHECK(group.n == 7);
    CHECK(DlpGroup::create(7).n == 3);

    // Generator powers enumerate every unit exactly once.
    std::set<std::uint32_t> seen;
    for (std::uint32_t j = 0; j < group.p - 1; ++j)
        seen.insert(dlp::pow_mod(group.a, j, group.p));
    CHECK(seen.size() == group.p - 1);
}

TEST_CASE("brute-force dlog inverts the generator table") {
    const auto group = DlpGroup::create(7);
    // Powers of 3 mod 7: 1, 3, 2, 6, 4, 5.
    CHECK(dlp::dlog_bruteforce(group, 1) == 0);
    CHECK(dlp::dlog_bruteforce(group, 3) == 1);
    CHECK(dlp::dlog_bruteforce(group, 2) == 2);
    CHECK(dlp::dlog_bruteforce(group, 6) == 3);
    CHECK(dlp::dlog_bruteforce(group, 4) == 4);
    CHECK(dlp::dlog_bruteforce(group, 5) == 5);
    CHECK_THROWS_AS(dlp::dlog_bruteforce(group, 0), DomainError);
    CHECK_THROWS_AS(dlp::dlog_bruteforce(group, 7), DomainError);

    const auto big = DlpGroup::create(1021);
    for (std::uint32_t x : {2u, 500u, 1020u})
        CHECK(dlp::pow_mod(big.a, dlp::dlog_bruteforce(big, x), big.p) == x);
}

TEST_CASE("concept labels carve balanced half intervals in dlog space") {
    const Concept c{DlpGroup::create(7), 1};
    std::set<std::uint32_t> plus;
    for (std::uint32_t x = 1; x <= 6; ++x)
        if (dlp::concept_label(c, x) == 1)
            plus.insert(x);
    CHECK(plus == std::set<std::uint32_t>{3, 2, 6});
    CHECK(dlp::concept_label(c, 1) == -1);

    for (const std::uint32_t p : {7u, 13u, 31u}) {
        const auto group = DlpGroup::create(p);
        for (std::uint32_t i = 1; i < p; ++i) {
            int plus_count = 0;
            for (std::uint32_t x = 1; x < p; ++x)
                if (dlp::concept_label({group, i}, x) == 1)
                    ++plus_count;
            CHECK(plus_count == static_cast<int>((p - 1) / 2));
        }
    }

    CHECK_THROWS_AS(dlp::concept_label({DlpGroup::create(7), 0}, 3), DomainError);
    CHECK_THROWS_AS(dlp::concept_label({DlpGroup::create(7), 7}, 3), DomainError);
}

TEST_CASE("feature states are uniform superpositions over orbits") {
    const auto group = DlpGroup::create(7);
    const auto state = dlp::feature_state(group, {1}, 1);
    CHECK(state.num_qubits == 3);
    const double amp = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(state.amps[1] - sim::Complex(amp, 0)) < 1e-15);
    CHECK(std::abs(state.amps[3] - sim::Complex(amp, 0)) < 1e-15);
    CHECK(std::abs(state.amps.norm() - 1.0) < 1e-12);

    // Full orbit: every x reaches the same uniform superposition.
    const auto five = DlpGroup::create(5);
    const auto whole = dlp::feature_state(five, {2}, 1);
    for (std::uint32_t x = 2; x <= 4; ++x)
        CHECK((dlp::feature_state(five, {2}, x).amps - whole.amps).norm() < 1e-15);

    CHECK_THROWS_AS(dlp::feature_state(group, {3}, 1), ConfigError);
    CHECK_THROWS_AS(dlp::feature_state(group, {0}, 1), ConfigError);
    CHECK_THROWS_AS(dlp::feature_state(group, {1}, 0), DomainError);
}

TEST_CASE("orbits have exactly 2^k distinct labels") {
    common::Rng rng(606);
    const std::vector<std::uint32_t> primes{7, 13, 127, 1021, 4093, 8191};
    std::vector<DlpGroup> groups;
    for (const auto p : primes)
        groups.push_back(DlpGroup::create(p));
    for (int trial = 0; trial < 200; ++trial) {
        const auto &group = groups[rng.index(groups.size())];
        int max_k = 1;
        while ((1u << (max_k + 1)) <= group.p - 1)
            ++max_k;
        const FeatureConfig cfg{1 + static_cast<int>(rng.index(
                                        static_cast<std::size_t>(max_k)))};
        const auto x =
            static_cast<std::uint32_t>(1 + rng.index(group.p - 1));
        const auto state = dlp::feature_state(group, cfg, x);
        int support = 0;
        for (Eigen::Index idx = 0; idx < state.dim(); ++idx)
            if (std::abs(state.amps[idx]) > 1e-12)
                ++support;
        CHECK(support == 1 << cfg.k);
    }
}

TEST_CASE("kernel entries equal orbit overlap fractions") {
    const auto group = DlpGroup::create(7);
    CHECK(dlp::kernel_entry(group, {1}, 5, 5) == doctest::Approx(1.0));
    // S_1 = {1, 3}, S_3 = {3, 2}: one shared label of two.
    CHECK(dlp::kernel_entry(group, {1}, 1, 3) == doctest::Approx(0.5));

    common::Rng rng(14);
    const auto big = DlpGroup::create(127);
    for (int trial = 0; trial < 500; ++trial) {
        const FeatureConfig cfg{1 + static_cast<int>(rng.index(5))};
        const auto x1 = static_cast<std::uint32_t>(1 + rng.index(126));
        const auto x2 = static_cast<std::uint32_t>(1 + rng.index(126));
        const double by_sets = dlp::kernel_entry(big, cfg, x1, x2);
        const double by_states =
            sim::inner_product(dlp::feature_state(big, cfg, x1),
                               dlp::feature_state(big, cfg, x2))
                .real();
        CHECK(std::abs(by_sets - by_states) < 1e-12);
    }
}

TEST_CASE("a shared pad leaves kernel entries untouched") {
    const auto group = DlpGroup::create(127);
    common::Rng rng(1001);
    const crypto::PadKey identity{common::Bits(7, 0), common::Bits(7, 0)};
    CHECK(dlp::padded_kernel_entry(group, {3}, 9, 70, identity) ==
          doctest::Approx(dlp::kernel_entry(group, {3}, 9, 70)));

    for (int trial = 0; trial < 500; ++trial) {
        const FeatureConfig cfg{1 + static_cast<int>(rng.index(5))};
        const auto x1 = static_cast<std::uint32_t>(1 + rng.index(126));
        const auto x2 = static_cast<std::uint32_t>(1 + rng.index(126));
        const auto pad = crypto::gen_pad(7, rng);
        CHECK(std::abs(dlp::padded_kernel_entry(group, cfg, x1, x2, pad) -
                       dlp::kernel_entry(group, cfg, x1, x2)) < 1e-12);
    }

    const auto pad1 = crypto::gen_pad(7, rng);
    auto pad2 = pad1;
    pad2.b[0] ^= 1;
    CHECK_THROWS_AS(dlp::padded_kernel_entry(group, {3}, 9, 70, pad1, pad2),
                    ProtocolError);
}

TEST_CASE("mismatched pads really would corrupt the kernel") {
    // Demonstration of why the pipeline insists on one pad per pair: under
    // different pads the raw inner product strays from the kernel value.
    const auto group = DlpGroup::create(7);
    const FeatureConfig cfg{1};
    common::Rng rng(27);
    double worst = 0.0;
    for (int trial = 0; trial < 64; ++trial) {
        const auto pad1 = crypto::gen_pad(3, rng);
        const auto pad2 = crypto::gen_pad(3, rng);
        if (pad1 == pad2)
            continue;
        const auto s1 =
            crypto::qotp_encrypt(dlp::feature_state(group, cfg, 1), pad1);
        const auto s2 =
            crypto::qotp_encrypt(dlp::feature_state(group, cfg, 3), pad2);
        const double raw = sim::inner_product(s1, s2).real();
        worst = std::max(worst,
                         std::abs(raw - dlp::kernel_entry(group, cfg, 1, 3)));
    }
    CHECK(worst > 0.4);
}

TEST_CASE("plaintext kernel matrices are symmetric psd with unit diagonal") {
    const auto group = DlpGroup::create(7);
    const auto kernel = dlp::kernel_matrix(group, {1}, {1, 3});
    CHECK(kernel.gram(0, 0) == doctest::Approx(1.0));
    CHECK(kernel.gram(0, 1) == doctest::Approx(0.5));
    CHECK(kernel.gram(1, 0) == doctest::Approx(0.5));
    CHECK(kernel.gram(1, 1) == doctest::Approx(1.0));
    kernel.validate();

    common::Rng rng(3030);
    const auto big = DlpGroup::create(127);
    auto samples = shuffled_units(127, rng);
    samples.resize(24);
    const auto gram = dlp::kernel_matrix(big, {4}, samples);
    gram.validate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(gram.gram);
    CHECK(eigen.eigenvalues().minCoeff() >= -1e-8);

    auto broken = gram;
    broken.gram(0, 1) += 0.1;
    CHECK_THROWS_AS(broken.validate(), ValidationError);
}

TEST_CASE("the delegated pipeline reproduces the plaintext kernel") {
    const auto seven = DlpGroup::create(7);
    const auto single = dlp::delegated_kernel_pipeline({5}, seven, {1}, 99);
    CHECK(single.matrix.gram.rows() == 1);
    CHECK(single.matrix.gram(0, 0) == doctest::Approx(1.0));

    const auto tiny = dlp::delegated_kernel_pipeline({1, 3}, seven, {1}, 99);
    CHECK(tiny.matrix.gram(0, 1) == doctest::Approx(0.5));
    CHECK(tiny.matrix.gram(1, 0) == doctest::Approx(0.5));

    common::Rng rng(11);
    const auto big = DlpGroup::create(127);
    auto samples = shuffled_units(127, rng);
    samples.resize(20);
    const FeatureConfig cfg{5};
    const auto res = dlp::delegated_kernel_pipeline(samples, big, cfg, 2024);
    const auto plain = dlp::kernel_matrix(big, cfg, samples);
    CHECK((res.matrix.gram - plain.gram).cwiseAbs().maxCoeff() < 1e-10);

    // One round for the whole matrix; bill bounded by the schema.
    const auto totals = protocol::account(res.transcript);
    CHECK(totals.rounds == 1);
    CHECK(res.measured_bits == totals.classical_bits);
    const std::uint64_t pairs = 20 * 21 / 2;
    CHECK(res.transcript.size() == 2 * pairs + 2);
    CHECK(res.bound_bits == 20 * 20 * 7);
    CHECK(res.measured_bits < 512 * res.bound_bits);

    // The server view shows ciphertext only.
    engine::ServerSecrets secrets;
    secrets.pads = res.pad_trace;
    for (const auto x : samples)
        secrets.samples.push_back(common::uint_to_bits(x, big.n));
    const auto report = engine::audit_server_view(res.log, secrets);
    for (const auto &finding : report.findings)
        MESSAGE(finding);
    CHECK(report.pass);
}

TEST_CASE("shot-estimated kernel entries land within the sampling envelope") {
    common::Rng rng(505);
    const auto group = DlpGroup::create(127);
    auto samples = shuffled_units(127, rng);
    samples.resize(6);
    const FeatureConfig cfg{5};
    const std::uint64_t shots = 4096;
    const auto noisy =
        dlp::delegated_kernel_pipeline(samples, group, cfg, 31415, shots);
    const auto plain = dlp::kernel_matrix(group, cfg, samples);
    const double envelope = 5.0 / std::sqrt(static_cast<double>(shots));
    CHECK((noisy.matrix.gram - plain.gram).cwiseAbs().maxCoeff() < envelope);
    CHECK(noisy.bound_bits == 6 * 6 * 7 * shots);
}

TEST_CASE("ridge classifier solves identity kernels exactly") {
    // Disjoint orbits at p=7, k=1: S_1={1,3}, S_2={2,6}, S_4={4,5}.
    const auto group = DlpGroup::create(7);
    const auto kernel = dlp::kernel_matrix(group, {1}, {1, 2, 4});
    CHECK(kernel.gram.isIdentity(1e-12));

    const std::vector<int> labels{1, -1, 1};
    const auto alpha = dlp::train_kernel_classifier(kernel, labels, 0.0);
    for (int i = 0; i < 3; ++i)
        CHECK(alpha[i] == doctest::Approx(labels[static_cast<std::size_t>(i)]));
    CHECK(dlp::kernel_predict(group, {1}, alpha, {1, 2, 4}, 1) == 1);
    CHECK(dlp::kernel_predict(group, {1}, alpha, {1, 2, 4}, 2) == -1);
    CHECK(dlp::kernel_predict(group, {1}, alpha, {1, 2, 4}, 4) == 1);
}

TEST_CASE("duplicated samples need a ridge to stay solvable") {
    const auto group = DlpGroup::create(7);
    const auto kernel = dlp::kernel_matrix(group, {1}, {3, 3});
    CHECK_THROWS_AS(dlp::train_kernel_classifier(kernel, {1, -1}, 0.0),
                    SolverError);

    const auto alpha = dlp::train_kernel_classifier(kernel, {1, 1}, 1e-6);
    CHECK(dlp::kernel_predict(group, {1}, alpha, {3, 3}, 3) == 1);

    CHECK_THROWS_AS(dlp::train_kernel_classifier(kernel, {1}, 1e-6), DomainError);
    CHECK_THROWS_AS(dlp::train_kernel_classifier(kernel, {1, 2}, 1e-6),
                    DomainError);
    CHECK_THROWS_AS(dlp::train_kernel_classifier(kernel, {1, 1}, -1.0),
                    DomainError);
}

TEST_CASE("delegated kernel classification matches plaintext end to end") {
    common::Rng rng(112233);
    const auto group = DlpGroup::create(127);
    const FeatureConfig cfg{5};
    const Concept target{group, 40};

    auto pool = shuffled_units(127, rng);
    pool.resize(100);
    const std::vector<std::uint32_t> train(pool.begin(), pool.begin() + 60);
    const std::vector<std::uint32_t> test(pool.begin() + 60, pool.end());
    std::vector<int> train_labels;
    for (const auto x : train)
        train_labels.push_back(dlp::concept_label(target, x));

    // Plaintext route first: it sets the accuracy bar.
    const auto plain_kernel = dlp::kernel_matrix(group, cfg, train);
    const auto plain_alpha =
        dlp::train_kernel_classifier(plain_kernel, train_labels, 1e-3);
    int plain_hits = 0;
    std::vector<int> plain_preds;
    for (const auto x : test) {
        const int pred = dlp::kernel_predict(group, cfg, plain_alpha, train, x);
        plain_preds.push_back(pred);
        if (pred == dlp::concept_label(target, x))
            ++plain_hits;
    }
    const double plain_accuracy = plain_hits / 40.0;
    CHECK(plain_accuracy >= 0.85);

    // Delegated route: one pipeline over train + test, blocks sliced out.
    const auto res = dlp::delegated_kernel_pipeline(pool, group, cfg, 888);
    dlp::KernelMatrix train_block{res.matrix.gram.topLeftCorner(60, 60), train};
    const auto alpha =
        dlp::train_kernel_classifier(train_block, train_labels, 1e-3);
    for (int t = 0; t < 40; ++t) {
        const Eigen::VectorXd row = res.matrix.gram.block(60 + t, 0, 1, 60)
                                        .transpose();
        CHECK(dlp::kernel_predict_row(alpha, row) ==
              plain_preds[static_cast<std::size_t>(t)]);
    }
}

TEST_CASE("kernel matrices export as numeric csv") {
    const auto group = DlpGroup::create(7);
    const auto kernel = dlp::kernel_matrix(group, {1}, {1, 3});
    CHECK(dlp::kernel_csv(kernel) == "1,0.5\n0.5,1\n");
}
