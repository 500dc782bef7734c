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
 * Federated training of one server-held model across independent clients.
 *
 * Each round a scheduled client draws a uniform batch without replacement
 * from its private dataset, computes the batch-average gradient entirely
 * through its own encrypted delegation channel, optionally sanitizes the
 * gradient (clip to norm C, add N(0, sigma^2 C^2) noise), and uploads the
 * refreshed parameters. Clients never share vaults; the parameters
 * themselves are public by design.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhel/learner/learner.hpp"

namespace qhel::federation {

/// One participant: private data plus a private delegation channel.
struct ClientNode {
    int id = 0;
    std::vector<learner::LabeledSample> dataset;
    learner::DelegationLink link;
};

ClientNode make_client(int id, std::vector<learner::LabeledSample> dataset,
                       std::uint64_t seed, std::uint64_t shots = 0);

struct DpConfig {
    double clip_norm = 1.0; // C > 0
    double sigma = 0.0;     // noise scale, >= 0
};

struct FedConfig {
    int num_clients = 1; // M
    int iterations = 1;  // T
    int batch_size = 1;
    double learning_rate = 0.1;
    learner::GradientMode mode = learner::GradientMode::ParameterShift;
    double fd_epsilon = 1e-5;
    std::optional<DpConfig> dp;
    std::uint64_t master_seed = 1;

    /// Checks the bounds above plus batch <= min client dataset size.
    void validate(const std::vector<ClientNode> &clients) const;
};

/// Which client acts in each round.
struct Schedule {
    std::vector<int> order;
};

/// Length-T sequence of i.i.d. uniform picks from [0, M).
Schedule generate_schedule(int iterations, int num_clients, common::Rng &rng);

/// g * min(1, C/|g|) plus N(0, sigma^2 C^2 I); sigma = 0 adds nothing and
/// consumes no randomness.
Eigen::VectorXd dp_sanitize(const Eigen::VectorXd &gradient, double clip_norm,
                            double sigma, common::Rng &rng);

struct RoundStats {
    int round = 0;
    int client_id = 0;
    double holdout_cost = 0.0; // after the round's update
    double grad_norm = 0.0;    // as uploaded, post-sanitization
    std::uint64_t classical_bits = 0; // cumulative over all client channels
    std::uint64_t qubits_sent = 0;
    std::uint64_t rounds = 0;
};

/// Mutable training state threaded through federated_round.
struct FederationState {
    learner::VariationalModel model;
    std::vector<ClientNode> clients;
    FedConfig config;
    Schedule schedule;
    std::vector<learner::LabeledSample> holdout;
    common::Rng batch_rng;
    common::Rng noise_rng;
    std::vector<RoundStats> history;

    static FederationState create(std::vector<ClientNode> clients,
                                  learner::VariationalModel model,
                                  const FedConfig &config,
                                  std::vector<learner::LabeledSample> holdout,
                                  std::optional<Schedule> schedule = {});
};

/// Executes round `round_index` of the schedule and appends its stats.
RoundStats federated_round(FederationState &state, int round_index);

struct FederationResult {
    learner::VariationalModel model;
    std::vector<RoundStats> history;
};

/// All T rounds in schedule order, with the same divergence guard as
/// train_delegated applied to the held-out cost.
FederationResult run_federated(std::vector<ClientNode> clients,
                               const learner::VariationalModel &init,
                               const FedConfig &config,
                               std::vector<learner::LabeledSample> holdout,
                               std::optional<Schedule> schedule = {});

/// CSV with header: round,client,cost,grad_norm,bits_sent,qubits_sent,rounds.
std::string federation_csv(const std::vector<RoundStats> &history);

} // namespace qhel::federation
