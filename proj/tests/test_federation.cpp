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
#include <set>

#include "qhel/federation/federation.hpp"
#include "qhel/sim/measure.hpp"

using namespace qhel;
using federation::ClientNode;
using federation::FedConfig;
using federation::Schedule;
using learner::LabeledSample;
using learner::VariationalModel;

namespace {

VariationalModel toy_model(double theta_ry, double theta_rz = 0.5) {
    auto model = VariationalModel::create(1, 1, false, 0);
    model.theta << theta_ry, theta_rz;
    return model;
}

/// The |0> -> +1, |1> -> -1 task, `copies` of each.
std::vector<LabeledSample> toy_data(int copies) {
    std::vector<LabeledSample> data;
    for (int i = 0; i < copies; ++i) {
        data.push_back({sim::basis_state(1, 0), 1.0, 2 * i});
        data.push_back({sim::basis_state(1, 1), -1.0, 2 * i + 1});
    }
    return data;
}

std::vector<LabeledSample> holdout_set() { return toy_data(1); }

/// Plaintext mirror of run_federated: same schedule and batch draws, local
/// gradients instead of delegated ones.
VariationalModel plaintext_federated_oracle(
    const std::vector<std::vector<LabeledSample>> &datasets,
    VariationalModel model, const FedConfig &config) {
    common::Rng root(config.master_seed);
    auto schedule_rng = root.derive("schedule");
    const auto schedule = federation::generate_schedule(
        config.iterations, config.num_clients, schedule_rng);
    auto batch_rng = root.derive("batch");
    for (int t = 0; t < config.iterations; ++t) {
        const auto &dataset =
            datasets[static_cast<std::size_t>(schedule.order[static_cast<std::size_t>(t)])];
        auto picks = batch_rng.sample_without_replacement(
            dataset.size(), static_cast<std::size_t>(config.batch_size));
        std::sort(picks.begin(), picks.end());
        std::vector<LabeledSample> batch;
        for (const auto p : picks)
            batch.push_back(dataset[p]);
        const auto grad = learner::cost_gradient(model, batch, config.mode,
                                                 config.fd_epsilon);
        model.theta -= config.learning_rate * grad;
    }
    return model;
}

} // namespace

TEST_CASE("schedules are uniform, reproducible, and validated") {
    common::Rng rng(7);
    const auto solo = federation::generate_schedule(40, 1, rng);
    CHECK(solo.order.size() == 40);
    CHECK(std::all_of(solo.order.begin(), solo.order.end(),
                      [](int i) { return i == 0; }));

    common::Rng a(123), b(123);
    CHECK(federation::generate_schedule(100, 4, a).order ==
          federation::generate_schedule(100, 4, b).order);

    const int trials = 10000;
    common::Rng freq_rng(99);
    const auto big = federation::generate_schedule(trials, 4, freq_rng);
    std::vector<int> counts(4, 0);
    for (const int i : big.order)
        ++counts[static_cast<std::size_t>(i)];
    for (const int c : counts) {
        const double f = static_cast<double>(c) / trials;
        CHECK(f > 0.20);
        CHECK(f < 0.30);
    }

    CHECK_THROWS_AS(federation::generate_schedule(0, 2, rng), DomainError);
    CHECK_THROWS_AS(federation::generate_schedule(5, 0, rng), DomainError);
}

TEST_CASE("dp sanitization clips exactly and is idempotent") {
    common::Rng rng(5);
    Eigen::VectorXd small(3);
    small << 0.1, -0.2, 0.2;
    CHECK((federation::dp_sanitize(small, 1.0, 0.0, rng) - small).norm() == 0.0);

    Eigen::VectorXd big(2);
    big << 3.0, 4.0; // norm 5 = 2 * 2.5
    const auto clipped = federation::dp_sanitize(big, 2.5, 0.0, rng);
    CHECK(clipped.norm() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(clipped[0] / clipped[1] == doctest::Approx(3.0 / 4.0));

    const auto again = federation::dp_sanitize(clipped, 2.5, 0.0, rng);
    CHECK((again - clipped).norm() == 0.0);

    CHECK_THROWS_AS(federation::dp_sanitize(big, 0.0, 0.1, rng), DomainError);
    CHECK_THROWS_AS(federation::dp_sanitize(big, 1.0, -0.1, rng), DomainError);
}

TEST_CASE("dp noise has the configured gaussian moments") {
    common::Rng rng(31337);
    const int draws = 10000;
    const int dim = 4;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd samples(dim, draws);
    for (int t = 0; t < draws; ++t)
        samples.col(t) = federation::dp_sanitize(zero, 1.0, 0.1, rng);
    for (int j = 0; j < dim; ++j) {
        const double mean = samples.row(j).mean();
        const double var =
            (samples.row(j).array() - mean).square().sum() / (draws - 1);
        CHECK(std::abs(mean) < 5e-3);
        CHECK(std::abs(std::sqrt(var) - 0.1) < 5e-3);
    }
}

TEST_CASE("single-client full-batch federation reduces to delegated training") {
    const auto init = toy_model(1.0);
    FedConfig config;
    config.num_clients = 1;
    config.iterations = 12;
    config.batch_size = 4;
    config.learning_rate = 0.2;
    config.master_seed = 88;

    auto fed = federation::run_federated(
        {federation::make_client(0, toy_data(2), 1234)}, init, config,
        holdout_set());

    learner::TrainConfig solo;
    solo.learning_rate = 0.2;
    solo.max_iterations = 12;
    auto link = learner::DelegationLink::create(1234);
    const auto reference = learner::train_delegated(init, toy_data(2), solo, link);

    REQUIRE(fed.history.size() == 12);
    for (int j = 0; j < init.param_count(); ++j)
        CHECK(std::abs(fed.model.theta[j] - reference.model.theta[j]) < 1e-9);
    for (std::size_t t = 0; t < fed.history.size(); ++t)
        CHECK(std::abs(fed.history[t].grad_norm -
                       reference.history[t].grad_norm) < 1e-9);
}

TEST_CASE("fixed master seed reproduces the run byte for byte") {
    const auto init = toy_model(0.8);
    FedConfig config;
    config.num_clients = 2;
    config.iterations = 10;
    config.batch_size = 2;
    config.learning_rate = 0.15;
    config.master_seed = 424242;

    const auto run = [&] {
        std::vector<ClientNode> clients{
            federation::make_client(0, toy_data(2), 7),
            federation::make_client(1, toy_data(3), 8)};
        return federation::run_federated(clients, init, config, holdout_set());
    };
    const auto first = run();
    const auto second = run();
    CHECK((first.model.theta - second.model.theta).norm() == 0.0);
    CHECK(federation::federation_csv(first.history) ==
          federation::federation_csv(second.history));
}

TEST_CASE("batch of one uses exactly the single-sample gradient") {
    // All dataset entries identical, so any pick yields the same batch.
    std::vector<LabeledSample> copies(3, LabeledSample{sim::basis_state(1, 0), 1.0, 0});
    const auto init = toy_model(1.1, 0.3);
    FedConfig config;
    config.num_clients = 1;
    config.iterations = 1;
    config.batch_size = 1;
    config.learning_rate = 0.5;

    auto fed = federation::run_federated(
        {federation::make_client(0, copies, 55)}, init, config, holdout_set());

    const auto grad = learner::cost_gradient(init, {copies[0]},
                                             learner::GradientMode::ParameterShift);
    for (int j = 0; j < init.param_count(); ++j)
        CHECK(std::abs(fed.model.theta[j] - (init.theta[j] - 0.5 * grad[j])) <
              1e-9);
}

TEST_CASE("two clients sharing the pooled dataset match the pooled run") {
    const auto init = toy_model(1.2);
    const auto pooled = toy_data(2);
    FedConfig config;
    config.num_clients = 2;
    config.iterations = 25;
    config.batch_size = static_cast<int>(pooled.size());
    config.learning_rate = 0.2;
    config.master_seed = 9;

    auto fed = federation::run_federated(
        {federation::make_client(0, pooled, 70),
         federation::make_client(1, pooled, 71)},
        init, config, holdout_set());

    learner::TrainConfig solo;
    solo.learning_rate = 0.2;
    solo.max_iterations = 25;
    const auto reference = learner::train_local(init, pooled, solo);

    const double fed_cost = learner::mse_cost(fed.model, pooled);
    const double ref_cost = learner::mse_cost(reference.model, pooled);
    CHECK(std::abs(fed_cost - ref_cost) <= 0.1 * ref_cost + 1e-9);
}

TEST_CASE("three-client toy federation reaches the accuracy floor") {
    const auto init = toy_model(1.0);
    FedConfig config;
    config.num_clients = 3;
    config.iterations = 300;
    config.batch_size = 4;
    config.learning_rate = 0.2;
    config.master_seed = 2026;

    std::vector<ClientNode> clients{
        federation::make_client(0, toy_data(2), 100),
        federation::make_client(1, toy_data(2), 101),
        federation::make_client(2, toy_data(2), 102)};
    std::vector<std::vector<LabeledSample>> datasets{
        clients[0].dataset, clients[1].dataset, clients[2].dataset};

    auto fed = federation::run_federated(clients, init, config, holdout_set());
    CHECK(learner::accuracy(fed.model, holdout_set()) >= 0.9);
    CHECK(fed.history.back().holdout_cost < 0.05);

    // The plaintext mirror replays the same schedule and batches.
    const auto oracle = plaintext_federated_oracle(datasets, init, config);
    CHECK(learner::accuracy(oracle, holdout_set()) >= 0.9);
    for (int j = 0; j < init.param_count(); ++j)
        CHECK(std::abs(fed.model.theta[j] - oracle.theta[j]) < 1e-6);
}

TEST_CASE("each round bills one trip per batch sample plus one upload") {
    const auto init = toy_model(0.9);
    FedConfig config;
    config.num_clients = 2;
    config.iterations = 6;
    config.batch_size = 3;
    config.learning_rate = 0.1;
    config.master_seed = 5;

    std::vector<ClientNode> clients{
        federation::make_client(0, toy_data(2), 20),
        federation::make_client(1, toy_data(2), 21)};
    auto fed = federation::run_federated(clients, init, config, holdout_set());

    CHECK(fed.history.back().rounds == 6 * 3);
    for (std::size_t t = 1; t < fed.history.size(); ++t)
        CHECK(fed.history[t].rounds - fed.history[t - 1].rounds == 3);
}

TEST_CASE("clients never share vaults") {
    auto alice = federation::make_client(0, toy_data(1), 1);
    auto bob = federation::make_client(1, toy_data(1), 2);
    CHECK(alice.link.keypair.vault_id() != bob.link.keypair.vault_id());

    common::Rng rng(3);
    const auto pad = crypto::gen_pad(1, rng);
    const auto ct = crypto::he_encrypt(pad.to_bits(), alice.link.keypair, rng);
    CHECK_THROWS_AS(bob.link.keypair.decrypt(ct), WrongKeyError);

    crypto::KeyUpdateCircuit identity;
    identity.num_bits = 2;
    CHECK_THROWS_AS(bob.link.keypair.handle().eval(ct, identity), WrongKeyError);
}

TEST_CASE("federation config and state reject bad setups") {
    const auto init = toy_model(1.0);
    std::vector<ClientNode> clients{federation::make_client(0, toy_data(1), 4)};

    FedConfig config;
    config.num_clients = 1;
    config.iterations = 0;
    CHECK_THROWS_AS(
        federation::run_federated(clients, init, config, holdout_set()),
        DomainError);

    config.iterations = 1;
    config.batch_size = 99;
    CHECK_THROWS_AS(
        federation::run_federated(clients, init, config, holdout_set()),
        DomainError);

    config.batch_size = 1;
    config.num_clients = 2;
    CHECK_THROWS_AS(
        federation::run_federated(clients, init, config, holdout_set()),
        DomainError);

    config.num_clients = 1;
    config.dp = federation::DpConfig{0.0, 0.1};
    CHECK_THROWS_AS(
        federation::run_federated(clients, init, config, holdout_set()),
        DomainError);

    config.dp.reset();
    CHECK_THROWS_AS(federation::run_federated(clients, init, config, {}),
                    DomainError);
    CHECK_THROWS_AS(federation::make_client(0, {}, 9), DomainError);

    // T = 1 runs exactly one round.
    auto one = federation::run_federated(clients, init, config, holdout_set());
    CHECK(one.history.size() == 1);

    auto state = federation::FederationState::create(
        std::move(clients), init, config, holdout_set());
    CHECK_THROWS_AS(federation::federated_round(state, 5), DomainError);
}

TEST_CASE("dp-noised runs stay trainable and deterministic") {
    const auto init = toy_model(1.0);
    FedConfig config;
    config.num_clients = 1;
    config.iterations = 40;
    config.batch_size = 4;
    config.learning_rate = 0.1;
    config.master_seed = 777;
    config.dp = federation::DpConfig{1.0, 0.05};

    const auto run = [&] {
        return federation::run_federated(
            {federation::make_client(0, toy_data(2), 12)}, init, config,
            holdout_set());
    };
    const auto noisy = run();
    const auto replay = run();
    CHECK((noisy.model.theta - replay.model.theta).norm() == 0.0);
    // Light noise still lets the toy task descend most of the way.
    CHECK(noisy.history.back().holdout_cost < 0.3);
}
