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
 * Variational binary classifier and its delegated training loop.
 *
 * The ansatz is layered: per layer, Ry then Rz on every qubit, then a CNOT
 * ring when entangling is on. The model predicts <Z_k>; class 1 when the
 * expectation is >= 0, class 2 otherwise. Cost is the mean square error
 * against labels in {+1, -1}; gradients come from the parameter-shift rule
 * or central finite differences.
 *
 * In delegated mode every expectation crosses the encrypted channel: the
 * client pads the sample with a fresh one-time pad per evaluation, the
 * server evaluates all requested parameter shifts in one batch, and the
 * whole batch costs exactly one protocol round.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhel/crypto/pad.hpp"
#include "qhel/crypto/vault.hpp"
#include "qhel/engine/engine.hpp"
#include "qhel/engine/server_view.hpp"
#include "qhel/protocol/transcript.hpp"
#include "qhel/sim/state_vector.hpp"

namespace qhel::learner {

/// Layered ansatz with slots named p0..p{2nl-1}; slot 2(l n + q) is the Ry
/// angle and 2(l n + q)+1 the Rz angle of qubit q in layer l.
engine::ServerCircuit layered_ansatz(int num_qubits, int layers, bool entangling);

struct VariationalModel {
    int num_qubits = 1;
    int layers = 0;
    bool entangling = true;
    int k = 0; // measured qubit
    Eigen::VectorXd theta;

    static VariationalModel create(int num_qubits, int layers, bool entangling,
                                   int k);

    int param_count() const { return 2 * num_qubits * layers; }

    /// Ansatz circuit with `params` bound onto the slots.
    engine::ServerCircuit bound_circuit(const Eigen::VectorXd &params) const;
    engine::ServerCircuit bound_circuit() const { return bound_circuit(theta); }

    /// Throws unless theta is finite and sized 2 * n * layers.
    void validate() const;
};

struct LabeledSample {
    sim::StateVector input;
    double y = 1.0; // in {+1, -1}
    int index = 0;
};

LabeledSample sample_from_bits(const common::Bits &bits, double y, int index);

enum class GradientMode { ParameterShift, FiniteDifference };

struct TrainConfig {
    double learning_rate = 0.1;
    int max_iterations = 100;
    GradientMode mode = GradientMode::ParameterShift;
    double fd_epsilon = 1e-5;
    std::uint64_t shots = 0; // 0 = exact expectations
    std::uint64_t seed = 1;

    void validate() const;
};

/// Plaintext expectation <Z_k> after the bound ansatz.
double predict(const VariationalModel &model, const sim::StateVector &input);

/// Class 1 when the expectation is >= 0, class 2 otherwise.
int classify(const VariationalModel &model, const sim::StateVector &input);

/// Mean square error of expectations against labels.
double mse_cost(const VariationalModel &model,
                const std::vector<LabeledSample> &dataset);

/// dC/dtheta_j through the parameter-shift identity
/// dE/dtheta_j = (E(theta_j + pi/2) - E(theta_j - pi/2)) / 2.
double parameter_shift_gradient(const VariationalModel &model,
                                const std::vector<LabeledSample> &dataset, int j);

/// Central finite difference of the cost in coordinate j.
double finite_difference_gradient(const VariationalModel &model,
                                  const std::vector<LabeledSample> &dataset, int j,
                                  double epsilon);

Eigen::VectorXd cost_gradient(const VariationalModel &model,
                              const std::vector<LabeledSample> &dataset,
                              GradientMode mode, double fd_epsilon = 1e-5);

/// One evaluation in a batch: add `delta` onto theta[param] (param < 0
/// evaluates the unshifted base point).
struct ShiftSpec {
    int param = -1;
    double delta = 0.0;
};

/// Client and server ends of one delegated channel, with the transcript,
/// the server view log, and the client's pad trace for post-hoc audits.
struct DelegationLink {
    crypto::HEKeypair keypair;
    common::Rng client_rng;
    common::Rng server_rng;
    protocol::Transcript transcript;
    engine::ServerViewLog log;
    std::vector<crypto::PadKey> pad_trace;
    std::uint64_t next_session = 1;
    std::uint64_t shots = 0;

    static DelegationLink create(std::uint64_t seed, std::uint64_t shots = 0);
};

/// Evaluates the model on one sample at every requested shift in a single
/// protocol round: fresh pad per encrypted copy, one request, one response,
/// decrypted expectations back in request order.
std::vector<double> delegated_evaluate(DelegationLink &link,
                                       const VariationalModel &model,
                                       const sim::StateVector &input,
                                       const std::vector<ShiftSpec> &shifts);

/// Classifies through the encrypted channel; the client sees only the
/// decrypted sign, never the model parameters.
int delegated_inference(DelegationLink &link, const VariationalModel &model,
                        const sim::StateVector &input);

/// Cost and gradient of one full dataset pass.
struct BatchEvaluation {
    double cost = 0.0;
    Eigen::VectorXd gradient;
};

/// Evaluates cost and gradient with every expectation delegated: one
/// single-round session per sample, shifts batched as in train_delegated.
BatchEvaluation delegated_batch(DelegationLink &link, const VariationalModel &model,
                                const std::vector<LabeledSample> &dataset,
                                GradientMode mode, double fd_epsilon = 1e-5);

/// Fraction of samples whose predicted class matches the label sign.
double accuracy(const VariationalModel &model,
                const std::vector<LabeledSample> &dataset);

struct IterationStats {
    int iteration = 0;
    double cost = 0.0;
    double grad_norm = 0.0;
    std::uint64_t classical_bits = 0; // cumulative transcript totals
    std::uint64_t qubits_sent = 0;
    std::uint64_t rounds = 0;
};

struct TrainResult {
    VariationalModel model;
    std::vector<IterationStats> history;
};

/// Gradient descent with every expectation routed through the encrypted
/// round trip; aborts when the cost stays above ten times its initial
/// value for twenty consecutive iterations.
TrainResult train_delegated(const VariationalModel &init,
                            const std::vector<LabeledSample> &dataset,
                            const TrainConfig &config, DelegationLink &link);

/// Plaintext twin of train_delegated: identical update rule and order, no
/// encryption. Exact-mode trajectories coincide with the delegated run.
TrainResult train_local(const VariationalModel &init,
                        const std::vector<LabeledSample> &dataset,
                        const TrainConfig &config);

/// CSV with header: iteration,cost,grad_norm,bits_sent,qubits_sent,rounds.
std::string history_csv(const std::vector<IterationStats> &history);

} // namespace qhel::learner
