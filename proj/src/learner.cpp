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

#include "qhel/learner/learner.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "qhel/sim/measure.hpp"

namespace qhel::learner {

namespace {

std::string slot_name(int j) { return "p" + std::to_string(j); }

constexpr double kCostBlowup = 10.0;
constexpr int kDivergenceStreak = 20;

void check_label(double y) {
    if (y != 1.0 && y != -1.0)
        throw DomainError("labels must be +1 or -1");
}

void check_dataset(const VariationalModel &model,
                   const std::vector<LabeledSample> &dataset) {
    if (dataset.empty())
        throw DomainError("dataset must be nonempty");
    for (const auto &sample : dataset) {
        check_label(sample.y);
        if (sample.input.num_qubits != model.num_qubits)
            throw DomainError("sample qubit count does not match the model");
    }
}

} // namespace

engine::ServerCircuit layered_ansatz(int num_qubits, int layers, bool entangling) {
    sim::check_qubit_count(num_qubits);
    if (layers < 0)
        throw DomainError("layer count must be non-negative");
    engine::ServerCircuit circuit;
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < num_qubits; ++q) {
            const int base = 2 * (l * num_qubits + q);
            circuit.add(sim::GateOp::ry(q, 0.0), slot_name(base));
            circuit.add(sim::GateOp::rz(q, 0.0), slot_name(base + 1));
        }
        if (entangling && num_qubits >= 2)
            for (int q = 0; q < num_qubits; ++q)
                circuit.add(sim::GateOp::cnot(q, (q + 1) % num_qubits));
    }
    return circuit;
}

VariationalModel VariationalModel::create(int num_qubits, int layers,
                                          bool entangling, int k) {
    sim::check_qubit_count(num_qubits);
    if (layers < 0)
        throw DomainError("layer count must be non-negative");
    if (k < 0 || k >= num_qubits)
        throw DomainError("measured qubit out of range");
    VariationalModel model;
    model.num_qubits = num_qubits;
    model.layers = layers;
    model.entangling = entangling;
    model.k = k;
    model.theta = Eigen::VectorXd::Zero(model.param_count());
    return model;
}

engine::ServerCircuit VariationalModel::bound_circuit(
    const Eigen::VectorXd &params) const {
    if (params.size() != param_count())
        throw DomainError("parameter vector does not match the ansatz");
    std::map<std::string, double> values;
    for (int j = 0; j < params.size(); ++j)
        values[slot_name(j)] = params[j];
    return layered_ansatz(num_qubits, layers, entangling).bind(values);
}

void VariationalModel::validate() const {
    sim::check_qubit_count(num_qubits);
    if (layers < 0)
        throw DomainError("layer count must be non-negative");
    if (k < 0 || k >= num_qubits)
        throw DomainError("measured qubit out of range");
    if (theta.size() != param_count())
        throw DomainError("parameter vector does not match the ansatz");
    if (!theta.allFinite())
        throw DomainError("parameters must be finite");
}

LabeledSample sample_from_bits(const common::Bits &bits, double y, int index) {
    check_label(y);
    return {sim::basis_state(static_cast<int>(bits.size()), common::bits_to_uint(bits)),
            y, index};
}

void TrainConfig::validate() const {
    if (learning_rate < 0.0 || !std::isfinite(learning_rate))
        throw DomainError("learning rate must be non-negative");
    if (max_iterations < 0)
        throw DomainError("iteration count must be non-negative");
    if (mode == GradientMode::FiniteDifference &&
        !(fd_epsilon > 0.0 && std::isfinite(fd_epsilon)))
        throw DomainError("finite-difference step must be positive");
}

namespace {

double expectation_at(const VariationalModel &model, const Eigen::VectorXd &params,
                      const sim::StateVector &input) {
    const auto state =
        sim::apply_all(input, model.bound_circuit(params).bound_gates());
    return sim::expectation(state, {model.k});
}

} // namespace

double predict(const VariationalModel &model, const sim::StateVector &input) {
    model.validate();
    if (input.num_qubits != model.num_qubits)
        throw DomainError("input qubit count does not match the model");
    return expectation_at(model, model.theta, input);
}

int classify(const VariationalModel &model, const sim::StateVector &input) {
    return predict(model, input) >= 0.0 ? 1 : 2;
}

double mse_cost(const VariationalModel &model,
                const std::vector<LabeledSample> &dataset) {
    model.validate();
    check_dataset(model, dataset);
    double sum = 0.0;
    for (const auto &sample : dataset) {
        const double e = expectation_at(model, model.theta, sample.input);
        sum += (e - sample.y) * (e - sample.y);
    }
    return sum / static_cast<double>(dataset.size());
}

double parameter_shift_gradient(const VariationalModel &model,
                                const std::vector<LabeledSample> &dataset, int j) {
    model.validate();
    check_dataset(model, dataset);
    if (j < 0 || j >= model.param_count())
        throw DomainError("parameter index out of range");
    Eigen::VectorXd plus = model.theta;
    Eigen::VectorXd minus = model.theta;
    plus[j] += M_PI / 2;
    minus[j] -= M_PI / 2;
    double sum = 0.0;
    for (const auto &sample : dataset) {
        const double e = expectation_at(model, model.theta, sample.input);
        const double de = (expectation_at(model, plus, sample.input) -
                           expectation_at(model, minus, sample.input)) /
                          2.0;
        sum += (e - sample.y) * de;
    }
    return 2.0 * sum / static_cast<double>(dataset.size());
}

double finite_difference_gradient(const VariationalModel &model,
                                  const std::vector<LabeledSample> &dataset, int j,
                                  double epsilon) {
    model.validate();
    check_dataset(model, dataset);
    if (j < 0 || j >= model.param_count())
        throw DomainError("parameter index out of range");
    if (!(epsilon > 0.0))
        throw DomainError("finite-difference step must be positive");
    VariationalModel shifted = model;
    shifted.theta[j] += epsilon;
    const double up = mse_cost(shifted, dataset);
    shifted.theta[j] = model.theta[j] - epsilon;
    const double down = mse_cost(shifted, dataset);
    return (up - down) / (2.0 * epsilon);
}

Eigen::VectorXd cost_gradient(const VariationalModel &model,
                              const std::vector<LabeledSample> &dataset,
                              GradientMode mode, double fd_epsilon) {
    Eigen::VectorXd grad(model.param_count());
    for (int j = 0; j < grad.size(); ++j)
        grad[j] = mode == GradientMode::ParameterShift
                      ? parameter_shift_gradient(model, dataset, j)
                      : finite_difference_gradient(model, dataset, j, fd_epsilon);
    return grad;
}

DelegationLink DelegationLink::create(std::uint64_t seed, std::uint64_t shots) {
    common::Rng root(seed);
    auto vault_rng = root.derive("vault");
    return DelegationLink{crypto::HEKeypair::create(vault_rng),
                          root.derive("client"),
                          root.derive("server"),
                          {},
                          {},
                          {},
                          1,
                          shots};
}

std::vector<double> delegated_evaluate(DelegationLink &link,
                                       const VariationalModel &model,
                                       const sim::StateVector &input,
                                       const std::vector<ShiftSpec> &shifts) {
    model.validate();
    if (input.num_qubits != model.num_qubits)
        throw DomainError("input qubit count does not match the model");
    if (shifts.empty())
        throw DomainError("evaluation batch must request at least one value");
    for (const auto &shift : shifts)
        if (shift.param >= model.param_count())
            throw DomainError("shifted parameter out of range");

    const int n = model.num_qubits;
    const auto session = link.next_session++;
    const auto handle = link.keypair.handle();

    // Pads are drawn without replacement within one session so the transcript
    // never reuses (a, b); once a tiny pad space is exhausted the cycle resets.
    const bool track = 2 * n <= 20;
    std::vector<char> seen(track ? std::size_t{1} << (2 * n) : 0, 0);
    std::size_t seen_count = 0;
    const auto fresh_pad = [&]() {
        auto pad = crypto::gen_pad(n, link.client_rng);
        if (!track)
            return pad;
        if (seen_count == seen.size()) {
            std::fill(seen.begin(), seen.end(), 0);
            seen_count = 0;
        }
        auto idx = common::bits_to_uint(pad.to_bits());
        while (seen[idx]) {
            pad = crypto::gen_pad(n, link.client_rng);
            idx = common::bits_to_uint(pad.to_bits());
        }
        seen[idx] = 1;
        ++seen_count;
        return pad;
    };

    // Client turn: one fresh pad per evaluation, one request for the batch.
    std::vector<engine::EncryptedState> copies;
    copies.reserve(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const auto pad = fresh_pad();
        link.pad_trace.push_back(pad);
        copies.push_back(
            engine::encrypt_state(input, pad, handle, link.client_rng, session));
        link.transcript.append(protocol::encrypted_sample(session, n));
    }
    link.transcript.append(protocol::eval_request(session, shifts.size()));

    // Server turn: evaluate every shifted circuit, answer in one message.
    std::vector<engine::EncryptedExpectation> results;
    results.reserve(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        Eigen::VectorXd params = model.theta;
        if (shifts[i].param >= 0)
            params[shifts[i].param] += shifts[i].delta;
        const auto evolved = engine::homomorphic_apply(
            copies[i], model.bound_circuit(params), handle, link.server_rng,
            &link.log);
        results.push_back(engine::encrypted_expectation_z(
            evolved, model.k, link.shots, link.server_rng, &link.log));
    }
    link.transcript.append(protocol::eval_response(session, shifts.size(), n));

    std::vector<double> values;
    values.reserve(results.size());
    for (const auto &ex : results)
        values.push_back(engine::decrypt_expectation(ex, link.keypair));
    return values;
}

int delegated_inference(DelegationLink &link, const VariationalModel &model,
                        const sim::StateVector &input) {
    const auto values = delegated_evaluate(link, model, input, {ShiftSpec{}});
    return values[0] >= 0.0 ? 1 : 2;
}

namespace {

std::vector<ShiftSpec> gradient_batch(int param_count, double delta) {
    std::vector<ShiftSpec> shifts;
    shifts.reserve(1 + 2 * static_cast<std::size_t>(param_count));
    shifts.push_back(ShiftSpec{});
    for (int j = 0; j < param_count; ++j) {
        shifts.push_back({j, delta});
        shifts.push_back({j, -delta});
    }
    return shifts;
}

/// Shared cost/gradient assembly so the delegated and local training loops
/// perform bit-identical arithmetic on their evaluation batches.
struct BatchAccumulator {
    explicit BatchAccumulator(int param_count)
        : shift_sum(Eigen::VectorXd::Zero(param_count)),
          plus_sum(Eigen::VectorXd::Zero(param_count)),
          minus_sum(Eigen::VectorXd::Zero(param_count)) {}

    void add(const std::vector<double> &values, double y) {
        const double base = values[0];
        cost_sum += (base - y) * (base - y);
        for (int j = 0; j < shift_sum.size(); ++j) {
            const double up = values[1 + 2 * static_cast<std::size_t>(j)];
            const double down = values[2 + 2 * static_cast<std::size_t>(j)];
            shift_sum[j] += (base - y) * (up - down) / 2.0;
            plus_sum[j] += (up - y) * (up - y);
            minus_sum[j] += (down - y) * (down - y);
        }
        ++count;
    }

    double cost() const { return cost_sum / static_cast<double>(count); }

    Eigen::VectorXd gradient(GradientMode mode, double fd_epsilon) const {
        const double n = static_cast<double>(count);
        if (mode == GradientMode::ParameterShift)
            return 2.0 * shift_sum / n;
        return (plus_sum - minus_sum) / (n * 2.0 * fd_epsilon);
    }

    double cost_sum = 0.0;
    Eigen::VectorXd shift_sum;
    Eigen::VectorXd plus_sum;
    Eigen::VectorXd minus_sum;
    int count = 0;
};

using BatchEval = std::function<std::vector<double>(
    const VariationalModel &, const LabeledSample &, const std::vector<ShiftSpec> &)>;

TrainResult train_loop(const VariationalModel &init,
                       const std::vector<LabeledSample> &dataset,
                       const TrainConfig &config, const BatchEval &evaluate,
                       protocol::Transcript *transcript,
                       std::uint64_t *next_session) {
    init.validate();
    config.validate();
    check_dataset(init, dataset);

    TrainResult result{init, {}};
    auto &model = result.model;
    const int pcount = model.param_count();
    const double delta =
        config.mode == GradientMode::ParameterShift ? M_PI / 2 : config.fd_epsilon;
    const auto shifts = gradient_batch(pcount, delta);

    double initial_cost = 0.0;
    int high_streak = 0;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        BatchAccumulator accum(pcount);
        for (const auto &sample : dataset)
            accum.add(evaluate(model, sample, shifts), sample.y);
        const double cost = accum.cost();
        const Eigen::VectorXd grad = accum.gradient(config.mode, config.fd_epsilon);

        if (iter == 0)
            initial_cost = cost;
        high_streak = cost > kCostBlowup * initial_cost ? high_streak + 1 : 0;
        if (high_streak >= kDivergenceStreak)
            throw SolverError("training diverged: cost above " +
                              std::to_string(kCostBlowup) + "x its initial value "
                              "for " +
                              std::to_string(kDivergenceStreak) + " iterations");

        model.theta -= config.learning_rate * grad;
        if (transcript)
            transcript->append(protocol::param_update(
                (*next_session)++, static_cast<std::uint64_t>(pcount)));

        IterationStats stats;
        stats.iteration = iter;
        stats.cost = cost;
        stats.grad_norm = grad.norm();
        if (transcript) {
            const auto totals = transcript->totals();
            stats.classical_bits = totals.classical_bits;
            stats.qubits_sent = totals.qubits_sent;
            stats.rounds = totals.rounds;
        }
        result.history.push_back(stats);
    }
    return result;
}

} // namespace

BatchEvaluation delegated_batch(DelegationLink &link, const VariationalModel &model,
                                const std::vector<LabeledSample> &dataset,
                                GradientMode mode, double fd_epsilon) {
    model.validate();
    check_dataset(model, dataset);
    if (mode == GradientMode::FiniteDifference && !(fd_epsilon > 0.0))
        throw DomainError("finite-difference step must be positive");
    const double delta =
        mode == GradientMode::ParameterShift ? M_PI / 2 : fd_epsilon;
    const auto shifts = gradient_batch(model.param_count(), delta);
    BatchAccumulator accum(model.param_count());
    for (const auto &sample : dataset)
        accum.add(delegated_evaluate(link, model, sample.input, shifts), sample.y);
    return {accum.cost(), accum.gradient(mode, fd_epsilon)};
}

double accuracy(const VariationalModel &model,
                const std::vector<LabeledSample> &dataset) {
    model.validate();
    check_dataset(model, dataset);
    int hits = 0;
    for (const auto &sample : dataset)
        if (classify(model, sample.input) == (sample.y > 0.0 ? 1 : 2))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

TrainResult train_delegated(const VariationalModel &init,
                            const std::vector<LabeledSample> &dataset,
                            const TrainConfig &config, DelegationLink &link) {
    link.shots = config.shots;
    const BatchEval evaluate = [&link](const VariationalModel &model,
                                       const LabeledSample &sample,
                                       const std::vector<ShiftSpec> &shifts) {
        return delegated_evaluate(link, model, sample.input, shifts);
    };
    return train_loop(init, dataset, config, evaluate, &link.transcript,
                      &link.next_session);
}

TrainResult train_local(const VariationalModel &init,
                        const std::vector<LabeledSample> &dataset,
                        const TrainConfig &config) {
    common::Rng shot_rng = common::Rng(config.seed).derive("local-shots");
    const BatchEval evaluate = [&config, &shot_rng](
                                   const VariationalModel &model,
                                   const LabeledSample &sample,
                                   const std::vector<ShiftSpec> &shifts) {
        std::vector<double> values;
        values.reserve(shifts.size());
        for (const auto &shift : shifts) {
            Eigen::VectorXd params = model.theta;
            if (shift.param >= 0)
                params[shift.param] += shift.delta;
            const auto state = sim::apply_all(
                sample.input, model.bound_circuit(params).bound_gates());
            values.push_back(config.shots == 0
                                 ? sim::expectation(state, {model.k})
                                 : sim::sample_z(state, model.k, config.shots,
                                                 shot_rng));
        }
        return values;
    };
    return train_loop(init, dataset, config, evaluate, nullptr, nullptr);
}

std::string history_csv(const std::vector<IterationStats> &history) {
    std::string out = "iteration,cost,grad_norm,bits_sent,qubits_sent,rounds\n";
    char buf[160];
    for (const auto &row : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%llu,%llu,%llu\n",
                      row.iteration, row.cost, row.grad_norm,
                      static_cast<unsigned long long>(row.classical_bits),
                      static_cast<unsigned long long>(row.qubits_sent),
                      static_cast<unsigned long long>(row.rounds));
        out += buf;
    }
    return out;
}

} // namespace qhel::learner
