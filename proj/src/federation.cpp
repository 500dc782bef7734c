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

#include "qhel/federation/federation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qhel::federation {

namespace {

constexpr double kCostBlowup = 10.0;
constexpr int kDivergenceStreak = 20;

} // namespace

ClientNode make_client(int id, std::vector<learner::LabeledSample> dataset,
                       std::uint64_t seed, std::uint64_t shots) {
    if (id < 0)
        throw DomainError("client id must be non-negative");
    if (dataset.empty())
        throw DomainError("client dataset must be nonempty");
    return {id, std::move(dataset), learner::DelegationLink::create(seed, shots)};
}

void FedConfig::validate(const std::vector<ClientNode> &clients) const {
    if (num_clients < 1)
        throw DomainError("federation needs at least one client");
    if (clients.size() != static_cast<std::size_t>(num_clients))
        throw DomainError("client list does not match the configured count");
    if (iterations < 1)
        throw DomainError("federation needs at least one round");
    if (batch_size < 1)
        throw DomainError("batch size must be positive");
    for (const auto &client : clients)
        if (static_cast<std::size_t>(batch_size) > client.dataset.size())
            throw DomainError("batch size exceeds the dataset of client " +
                              std::to_string(client.id));
    if (learning_rate < 0.0 || !std::isfinite(learning_rate))
        throw DomainError("learning rate must be non-negative");
    if (mode == learner::GradientMode::FiniteDifference && !(fd_epsilon > 0.0))
        throw DomainError("finite-difference step must be positive");
    if (dp) {
        if (!(dp->clip_norm > 0.0))
            throw DomainError("clip norm must be positive");
        if (dp->sigma < 0.0)
            throw DomainError("noise scale must be non-negative");
    }
}

Schedule generate_schedule(int iterations, int num_clients, common::Rng &rng) {
    if (iterations < 1)
        throw DomainError("schedule needs at least one round");
    if (num_clients < 1)
        throw DomainError("schedule needs at least one client");
    Schedule schedule;
    schedule.order.reserve(static_cast<std::size_t>(iterations));
    for (int t = 0; t < iterations; ++t)
        schedule.order.push_back(static_cast<int>(
            rng.index(static_cast<std::size_t>(num_clients))));
    return schedule;
}

Eigen::VectorXd dp_sanitize(const Eigen::VectorXd &gradient, double clip_norm,
                            double sigma, common::Rng &rng) {
    if (!(clip_norm > 0.0))
        throw DomainError("clip norm must be positive");
    if (sigma < 0.0)
        throw DomainError("noise scale must be non-negative");
    const double norm = gradient.norm();
    Eigen::VectorXd out =
        norm > clip_norm ? (gradient * (clip_norm / norm)).eval() : gradient;
    if (sigma > 0.0)
        for (int j = 0; j < out.size(); ++j)
            out[j] += rng.normal(0.0, sigma * clip_norm);
    return out;
}

FederationState FederationState::create(std::vector<ClientNode> clients,
                                        learner::VariationalModel model,
                                        const FedConfig &config,
                                        std::vector<learner::LabeledSample> holdout,
                                        std::optional<Schedule> schedule) {
    model.validate();
    config.validate(clients);
    if (holdout.empty())
        throw DomainError("federation needs a held-out metric set");
    for (const auto &client : clients)
        for (const auto &sample : client.dataset)
            if (sample.input.num_qubits != model.num_qubits)
                throw DomainError("client data does not match the model width");

    common::Rng root(config.master_seed);
    auto schedule_rng = root.derive("schedule");
    Schedule order = schedule ? std::move(*schedule)
                              : generate_schedule(config.iterations,
                                                  config.num_clients, schedule_rng);
    if (order.order.size() != static_cast<std::size_t>(config.iterations))
        throw DomainError("schedule length must equal the round count");
    for (const int idx : order.order)
        if (idx < 0 || idx >= config.num_clients)
            throw DomainError("schedule entry out of range");

    return FederationState{std::move(model),
                           std::move(clients),
                           config,
                           std::move(order),
                           std::move(holdout),
                           root.derive("batch"),
                           root.derive("noise"),
                           {}};
}

RoundStats federated_round(FederationState &state, int round_index) {
    if (round_index < 0 ||
        round_index >= static_cast<int>(state.schedule.order.size()))
        throw DomainError("round index outside the schedule");
    auto &client = state.clients[static_cast<std::size_t>(
        state.schedule.order[static_cast<std::size_t>(round_index)])];

    auto picks = state.batch_rng.sample_without_replacement(
        client.dataset.size(), static_cast<std::size_t>(state.config.batch_size));
    std::sort(picks.begin(), picks.end());
    std::vector<learner::LabeledSample> batch;
    batch.reserve(picks.size());
    for (const auto p : picks)
        batch.push_back(client.dataset[p]);

    auto eval = learner::delegated_batch(client.link, state.model, batch,
                                         state.config.mode,
                                         state.config.fd_epsilon);
    Eigen::VectorXd grad = std::move(eval.gradient);
    if (state.config.dp)
        grad = dp_sanitize(grad, state.config.dp->clip_norm,
                           state.config.dp->sigma, state.noise_rng);

    state.model.theta -= state.config.learning_rate * grad;
    client.link.transcript.append(protocol::param_update(
        client.link.next_session++,
        static_cast<std::uint64_t>(state.model.param_count())));

    RoundStats stats;
    stats.round = round_index;
    stats.client_id = client.id;
    stats.holdout_cost = learner::mse_cost(state.model, state.holdout);
    stats.grad_norm = grad.norm();
    for (const auto &node : state.clients) {
        const auto totals = protocol::account(node.link.transcript);
        stats.classical_bits += totals.classical_bits;
        stats.qubits_sent += totals.qubits_sent;
        stats.rounds += totals.rounds;
    }
    state.history.push_back(stats);
    return stats;
}

FederationResult run_federated(std::vector<ClientNode> clients,
                               const learner::VariationalModel &init,
                               const FedConfig &config,
                               std::vector<learner::LabeledSample> holdout,
                               std::optional<Schedule> schedule) {
    auto state = FederationState::create(std::move(clients), init, config,
                                         std::move(holdout), std::move(schedule));
    const double initial_cost = learner::mse_cost(state.model, state.holdout);
    int high_streak = 0;
    for (int t = 0; t < config.iterations; ++t) {
        const auto stats = federated_round(state, t);
        high_streak = stats.holdout_cost > kCostBlowup * initial_cost
                          ? high_streak + 1
                          : 0;
        if (high_streak >= kDivergenceStreak)
            throw SolverError("federated training diverged: held-out cost above " +
                              std::to_string(kCostBlowup) +
                              "x its initial value for " +
                              std::to_string(kDivergenceStreak) + " rounds");
    }
    return {std::move(state.model), std::move(state.history)};
}

std::string federation_csv(const std::vector<RoundStats> &history) {
    std::string out = "round,client,cost,grad_norm,bits_sent,qubits_sent,rounds\n";
    char buf[192];
    for (const auto &row : history) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g,%llu,%llu,%llu\n",
                      row.round, row.client_id, row.holdout_cost, row.grad_norm,
                      static_cast<unsigned long long>(row.classical_bits),
                      static_cast<unsigned long long>(row.qubits_sent),
                      static_cast<unsigned long long>(row.rounds));
        out += buf;
    }
    return out;
}

} // namespace qhel::federation
