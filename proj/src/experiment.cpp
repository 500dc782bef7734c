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

#include "qhel/protocol/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "qhel/common/bits.hpp"
#include "qhel/common/errors.hpp"
#include "qhel/common/rng.hpp"
#include "qhel/dlp/dlp.hpp"
#include "qhel/federation/federation.hpp"
#include "qhel/learner/learner.hpp"
#include "qhel/protocol/transcript.hpp"

namespace qhel::experiment {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string field(const std::string &key) { return "settings." + key; }

void check_object(const json &doc, const std::string &path) {
    if (!doc.is_object())
        throw ConfigError(path, "must be a JSON object");
}

void check_keys(const json &obj, const std::string &prefix,
                std::initializer_list<const char *> allowed) {
    for (const auto &item : obj.items()) {
        bool known = false;
        for (const auto *key : allowed)
            known = known || item.key() == key;
        if (!known)
            throw ConfigError(prefix + item.key(), "unknown field");
    }
}

std::int64_t get_int(const json &obj, const std::string &key, std::int64_t def,
                     std::int64_t lo, std::int64_t hi) {
    if (!obj.contains(key))
        return def;
    const auto &v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(field(key), "must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi)
        throw ConfigError(field(key), "must be in [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "]");
    return x;
}

double get_num(const json &obj, const std::string &key, double def, double lo,
               double hi) {
    if (!obj.contains(key))
        return def;
    const auto &v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(field(key), "must be a number");
    const auto x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi)
        throw ConfigError(field(key), "must be finite in [" + std::to_string(lo) +
                                          ", " + std::to_string(hi) + "]");
    return x;
}

std::string get_choice(const json &obj, const std::string &key,
                       const std::string &def,
                       std::initializer_list<const char *> choices) {
    if (!obj.contains(key))
        return def;
    const auto &v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(field(key), "must be a string");
    const auto s = v.get<std::string>();
    for (const auto *c : choices)
        if (s == c)
            return s;
    std::string msg = "must be one of";
    for (const auto *c : choices)
        msg += std::string(" '") + c + "'";
    throw ConfigError(field(key), msg);
}

json normalize_settings(ExperimentKind kind, const json &raw) {
    check_object(raw, "settings");
    json s = json::object();
    switch (kind) {
    case ExperimentKind::DemoInference:
        check_keys(raw, "settings.", {"num_qubits", "layers", "trials"});
        s["num_qubits"] = get_int(raw, "num_qubits", 2, 1, 5);
        s["layers"] = get_int(raw, "layers", 2, 1, 4);
        s["trials"] = get_int(raw, "trials", 20, 1, 1000);
        break;
    case ExperimentKind::TrainDelegated:
        check_keys(raw, "settings.",
                   {"num_qubits", "layers", "learning_rate", "iterations",
                    "gradient", "fd_epsilon"});
        s["num_qubits"] = get_int(raw, "num_qubits", 1, 1, 4);
        s["layers"] = get_int(raw, "layers", 1, 1, 3);
        s["learning_rate"] = get_num(raw, "learning_rate", 0.2, 0.0, 10.0);
        s["iterations"] = get_int(raw, "iterations", 200, 1, 10000);
        s["gradient"] = get_choice(raw, "gradient", "shift", {"shift", "fd"});
        s["fd_epsilon"] = get_num(raw, "fd_epsilon", 1e-5, 1e-12, 1.0);
        break;
    case ExperimentKind::TrainFederated: {
        check_keys(raw, "settings.",
                   {"num_clients", "iterations", "batch_size", "learning_rate",
                    "num_qubits", "layers", "copies", "gradient", "fd_epsilon",
                    "dp_clip_norm", "dp_sigma"});
        s["num_clients"] = get_int(raw, "num_clients", 3, 1, 8);
        s["iterations"] = get_int(raw, "iterations", 300, 1, 5000);
        s["batch_size"] = get_int(raw, "batch_size", 2, 1, 64);
        s["learning_rate"] = get_num(raw, "learning_rate", 0.2, 0.0, 10.0);
        s["num_qubits"] = get_int(raw, "num_qubits", 1, 1, 4);
        s["layers"] = get_int(raw, "layers", 1, 1, 3);
        s["copies"] = get_int(raw, "copies", 2, 1, 16);
        s["gradient"] = get_choice(raw, "gradient", "shift", {"shift", "fd"});
        s["fd_epsilon"] = get_num(raw, "fd_epsilon", 1e-5, 1e-12, 1.0);
        s["dp_clip_norm"] = get_num(raw, "dp_clip_norm", 0.0, 0.0, 1e6);
        s["dp_sigma"] = get_num(raw, "dp_sigma", 0.0, 0.0, 1e6);
        if (s["dp_sigma"].get<double>() > 0.0 &&
            s["dp_clip_norm"].get<double>() == 0.0)
            throw ConfigError(field("dp_sigma"), "needs a positive dp_clip_norm");
        const auto per_client = s["copies"].get<std::int64_t>()
                                << s["num_qubits"].get<std::int64_t>();
        if (s["batch_size"].get<std::int64_t>() > per_client)
            throw ConfigError(field("batch_size"),
                              "exceeds the per-client dataset size");
        break;
    }
    case ExperimentKind::DlpKernel: {
        check_keys(raw, "settings.",
                   {"p", "k", "train_size", "test_size", "lambda",
                    "concept_index"});
        const auto p = get_int(raw, "p", 127, 3, 1 << 16);
        if (!dlp::is_prime(static_cast<std::uint32_t>(p)))
            throw ConfigError(field("p"), "must be a prime");
        const auto k = get_int(raw, "k", 5, 1, 16);
        if ((std::int64_t{1} << k) > p - 1)
            throw ConfigError(field("k"), "orbit 2^k exceeds the group order");
        const auto train = get_int(raw, "train_size", 60, 1, p - 1);
        const auto test = get_int(raw, "test_size", 40, 0, p - 1);
        if (train + test > p - 1)
            throw ConfigError(field("test_size"),
                              "train_size + test_size exceeds the unit count");
        s["p"] = p;
        s["k"] = k;
        s["train_size"] = train;
        s["test_size"] = test;
        s["lambda"] = get_num(raw, "lambda", 1e-3, 0.0, 1e6);
        s["concept_index"] = get_int(raw, "concept_index", 40 % (p - 1) + 1, 1,
                                     p - 1);
        break;
    }
    case ExperimentKind::AuditPrivacy:
        check_keys(raw, "settings.", {"num_qubits", "trials"});
        s["num_qubits"] = get_int(raw, "num_qubits", 2, 1, 3);
        s["trials"] = get_int(raw, "trials", 25, 1, 500);
        break;
    case ExperimentKind::CompareComm:
        check_keys(raw, "settings.", {"num_qubits", "layers"});
        s["num_qubits"] = get_int(raw, "num_qubits", 3, 2, 5);
        s["layers"] = get_int(raw, "layers", 2, 1, 4);
        break;
    }
    return s;
}

std::uint64_t fnv1a64(const std::string &bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

sim::StateVector random_state(int n, common::Rng &rng) {
    sim::AmpVector amps(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < amps.size(); ++i)
        amps[i] = sim::Complex(rng.normal(0, 1), rng.normal(0, 1));
    return sim::state_from_amplitudes(std::move(amps));
}

Eigen::VectorXd random_theta(int count, double radius, common::Rng &rng) {
    Eigen::VectorXd theta(count);
    for (int j = 0; j < count; ++j)
        theta[j] = rng.uniform(-radius, radius);
    return theta;
}

/// All basis states of n qubits labeled by qubit 0: |...0> -> +1.
std::vector<learner::LabeledSample> parity_dataset(int n, int copies = 1) {
    std::vector<learner::LabeledSample> dataset;
    int index = 0;
    for (int c = 0; c < copies; ++c)
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            const auto bits = common::uint_to_bits(x, n);
            const double y = bits[0] == 0 ? 1.0 : -1.0;
            dataset.push_back(learner::sample_from_bits(bits, y, index++));
        }
    return dataset;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

json totals_json(const protocol::Totals &t) {
    return {{"qubits_sent", t.qubits_sent},
            {"classical_bits", t.classical_bits},
            {"rounds", t.rounds}};
}

json base_summary(const ExperimentConfig &config) {
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    return {{"kind", kind_name(config.kind)},
            {"version", kVersion},
            {"seed", config.seed},
            {"shots", config.shots},
            {"config_hash", hash},
            {"settings", config.settings}};
}

ExperimentResult run_demo_inference(const ExperimentConfig &config) {
    const auto &s = config.settings;
    const int n = s.at("num_qubits").get<int>();
    const int layers = s.at("layers").get<int>();
    const int trials = s.at("trials").get<int>();

    common::Rng root(config.seed);
    auto model_rng = root.derive("model");
    auto input_rng = root.derive("inputs");
    auto model = learner::VariationalModel::create(n, layers, true, 0);
    model.theta = random_theta(model.param_count(), kPi, model_rng);
    auto link = learner::DelegationLink::create(root.derive("link").u64(),
                                                config.shots);

    std::string csv = "trial,expectation,plain_class,delegated_class\n";
    int agree = 0;
    for (int t = 0; t < trials; ++t) {
        const auto input = random_state(n, input_rng);
        const int plain = learner::classify(model, input);
        const int delegated = learner::delegated_inference(link, model, input);
        agree += plain == delegated ? 1 : 0;
        csv += std::to_string(t) + "," + fmt(learner::predict(model, input)) +
               "," + std::to_string(plain) + "," + std::to_string(delegated) +
               "\n";
    }

    const auto totals = protocol::account(link.transcript);
    auto summary = base_summary(config);
    summary["trials"] = trials;
    summary["agreement"] = static_cast<double>(agree) / trials;
    summary["rounds_per_inference"] =
        static_cast<double>(totals.rounds) / trials;
    summary["totals"] = totals_json(totals);
    return {summary, csv, link.transcript.to_jsonl()};
}

ExperimentResult run_train_delegated(const ExperimentConfig &config) {
    const auto &s = config.settings;
    const int n = s.at("num_qubits").get<int>();
    auto init = learner::VariationalModel::create(n, s.at("layers").get<int>(),
                                                  true, 0);
    common::Rng root(config.seed);
    auto init_rng = root.derive("init");
    init.theta = random_theta(init.param_count(), 0.5, init_rng);

    learner::TrainConfig train;
    train.learning_rate = s.at("learning_rate").get<double>();
    train.max_iterations = s.at("iterations").get<int>();
    train.mode = s.at("gradient").get<std::string>() == "fd"
                     ? learner::GradientMode::FiniteDifference
                     : learner::GradientMode::ParameterShift;
    train.fd_epsilon = s.at("fd_epsilon").get<double>();
    train.shots = config.shots;
    train.seed = root.derive("train").u64();

    const auto dataset = parity_dataset(n);
    auto link = learner::DelegationLink::create(root.derive("link").u64(),
                                                config.shots);
    const auto result = learner::train_delegated(init, dataset, train, link);

    auto summary = base_summary(config);
    summary["iterations_run"] = result.history.size();
    summary["final_cost"] = result.history.back().cost;
    summary["final_accuracy"] = learner::accuracy(result.model, dataset);
    summary["totals"] = totals_json(protocol::account(link.transcript));
    if (config.shots == 0) {
        const auto twin = learner::train_local(init, dataset, train);
        double dev = 0.0;
        for (std::size_t i = 0; i < result.history.size(); ++i)
            dev = std::max(dev, std::abs(result.history[i].cost -
                                         twin.history[i].cost));
        summary["local_trajectory_max_deviation"] = dev;
    }
    return {summary, learner::history_csv(result.history),
            link.transcript.to_jsonl()};
}

ExperimentResult run_train_federated(const ExperimentConfig &config) {
    const auto &s = config.settings;
    const int n = s.at("num_qubits").get<int>();
    const int num_clients = s.at("num_clients").get<int>();
    const int copies = s.at("copies").get<int>();

    common::Rng root(config.seed);
    auto links = root.derive("links");
    std::vector<federation::ClientNode> clients;
    for (int id = 0; id < num_clients; ++id)
        clients.push_back(federation::make_client(id, parity_dataset(n, copies),
                                                  links.u64(), config.shots));

    auto init = learner::VariationalModel::create(n, s.at("layers").get<int>(),
                                                  true, 0);
    auto init_rng = root.derive("init");
    init.theta = random_theta(init.param_count(), 0.5, init_rng);

    federation::FedConfig fed;
    fed.num_clients = num_clients;
    fed.iterations = s.at("iterations").get<int>();
    fed.batch_size = s.at("batch_size").get<int>();
    fed.learning_rate = s.at("learning_rate").get<double>();
    fed.mode = s.at("gradient").get<std::string>() == "fd"
                   ? learner::GradientMode::FiniteDifference
                   : learner::GradientMode::ParameterShift;
    fed.fd_epsilon = s.at("fd_epsilon").get<double>();
    if (s.at("dp_clip_norm").get<double>() > 0.0)
        fed.dp = federation::DpConfig{s.at("dp_clip_norm").get<double>(),
                                      s.at("dp_sigma").get<double>()};
    fed.master_seed = root.derive("fed").u64();

    const auto holdout = parity_dataset(n);
    auto state = federation::FederationState::create(std::move(clients), init,
                                                     fed, holdout);
    // Same runaway guard as the single-channel trainer.
    const double initial = learner::mse_cost(init, holdout);
    int streak = 0;
    for (int t = 0; t < fed.iterations; ++t) {
        const auto stats = federation::federated_round(state, t);
        streak = stats.holdout_cost > 10.0 * initial ? streak + 1 : 0;
        if (streak >= 20)
            throw SolverError("federated cost diverged; lower the learning rate");
    }

    auto summary = base_summary(config);
    summary["rounds_run"] = state.history.size();
    summary["final_holdout_cost"] = state.history.back().holdout_cost;
    summary["final_holdout_accuracy"] = learner::accuracy(state.model, holdout);
    summary["totals"] = {{"qubits_sent", state.history.back().qubits_sent},
                         {"classical_bits", state.history.back().classical_bits},
                         {"rounds", state.history.back().rounds}};
    std::string jsonl;
    for (const auto &client : state.clients)
        jsonl += client.link.transcript.to_jsonl();
    return {summary, federation::federation_csv(state.history), jsonl};
}

ExperimentResult run_dlp_kernel(const ExperimentConfig &config) {
    const auto &s = config.settings;
    const auto group =
        dlp::DlpGroup::create(s.at("p").get<std::uint32_t>());
    const dlp::FeatureConfig cfg{s.at("k").get<int>()};
    const dlp::Concept target{group, s.at("concept_index").get<std::uint32_t>()};
    const int train_size = s.at("train_size").get<int>();
    const int test_size = s.at("test_size").get<int>();
    const double lambda = s.at("lambda").get<double>();

    common::Rng root(config.seed);
    auto sample_rng = root.derive("samples");
    std::vector<std::uint32_t> pool(group.p - 1);
    std::iota(pool.begin(), pool.end(), 1u);
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[sample_rng.index(i)]);
    pool.resize(static_cast<std::size_t>(train_size + test_size));
    const std::vector<std::uint32_t> train(pool.begin(),
                                           pool.begin() + train_size);

    const auto res = dlp::delegated_kernel_pipeline(
        pool, group, cfg, root.derive("pipeline").u64(), config.shots);
    const auto plain = dlp::kernel_matrix(group, cfg, pool);
    const double kernel_error =
        (res.matrix.gram - plain.gram).cwiseAbs().maxCoeff();

    engine::ServerSecrets secrets;
    secrets.pads = res.pad_trace;
    for (const auto x : pool)
        secrets.samples.push_back(common::uint_to_bits(x, group.n));
    const auto audit = engine::audit_server_view(res.log, secrets);

    auto summary = base_summary(config);
    summary["generator"] = group.a;
    summary["kernel_max_error"] = kernel_error;
    summary["measured_bits"] = res.measured_bits;
    summary["bound_bits"] = res.bound_bits;
    summary["totals"] = totals_json(protocol::account(res.transcript));
    summary["audit_pass"] = audit.pass;

    std::string csv;
    if (config.shots == 0 && test_size > 0) {
        std::vector<int> labels;
        for (const auto x : train)
            labels.push_back(dlp::concept_label(target, x));
        const dlp::KernelMatrix block{
            res.matrix.gram.topLeftCorner(train_size, train_size), train};
        const auto alpha = dlp::train_kernel_classifier(block, labels, lambda);
        const auto plain_alpha = dlp::train_kernel_classifier(
            dlp::KernelMatrix{plain.gram.topLeftCorner(train_size, train_size),
                              train},
            labels, lambda);

        csv = "index,sample,label,delegated_prediction,plaintext_prediction\n";
        int hits = 0;
        bool match = true;
        for (int t = 0; t < test_size; ++t) {
            const auto x = pool[static_cast<std::size_t>(train_size + t)];
            const Eigen::VectorXd row =
                res.matrix.gram.block(train_size + t, 0, 1, train_size)
                    .transpose();
            const int pred = dlp::kernel_predict_row(alpha, row);
            const int plain_pred =
                dlp::kernel_predict(group, cfg, plain_alpha, train, x);
            const int label = dlp::concept_label(target, x);
            hits += pred == label ? 1 : 0;
            match = match && pred == plain_pred;
            csv += std::to_string(t) + "," + std::to_string(x) + "," +
                   std::to_string(label) + "," + std::to_string(pred) + "," +
                   std::to_string(plain_pred) + "\n";
        }
        summary["test_accuracy"] = static_cast<double>(hits) / test_size;
        summary["matches_plaintext"] = match;
    } else {
        // Shot mode reports estimation quality; the ridge solve expects an
        // exact Gram matrix.
        csv = "row,col,delegated,plaintext\n";
        for (Eigen::Index i = 0; i < res.matrix.gram.rows(); ++i)
            for (Eigen::Index j = i; j < res.matrix.gram.cols(); ++j)
                csv += std::to_string(i) + "," + std::to_string(j) + "," +
                       fmt(res.matrix.gram(i, j)) + "," +
                       fmt(plain.gram(i, j)) + "\n";
    }
    return {summary, csv, res.transcript.to_jsonl()};
}

ExperimentResult run_audit_privacy(const ExperimentConfig &config) {
    const auto &s = config.settings;
    const int n = s.at("num_qubits").get<int>();
    const int trials = s.at("trials").get<int>();

    common::Rng root(config.seed);
    auto state_rng = root.derive("states");
    auto model_rng = root.derive("model");
    auto input_rng = root.derive("inputs");

    std::string csv = "trial,mixedness_deviation\n";
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double dev = engine::audit_mixedness(random_state(n, state_rng));
        worst = std::max(worst, dev);
        csv += std::to_string(t) + "," + fmt(dev) + "\n";
    }

    // End-to-end sessions, then the server log is swept for the secrets.
    auto model = learner::VariationalModel::create(n, 1, n > 1, 0);
    model.theta = random_theta(model.param_count(), kPi, model_rng);
    auto link = learner::DelegationLink::create(root.derive("link").u64(),
                                                config.shots);
    engine::ServerSecrets secrets;
    for (int t = 0; t < trials; ++t) {
        const auto x = input_rng.index(std::size_t{1} << n);
        secrets.samples.push_back(common::uint_to_bits(x, n));
        learner::delegated_inference(link, model,
                                     sim::basis_state(n, x));
    }
    secrets.pads = link.pad_trace;
    const auto audit = engine::audit_server_view(link.log, secrets);

    auto summary = base_summary(config);
    summary["max_mixedness_deviation"] = worst;
    summary["audit_pass"] = audit.pass;
    summary["audit_findings"] = audit.findings;
    summary["totals"] = totals_json(protocol::account(link.transcript));
    return {summary, csv, link.transcript.to_jsonl()};
}

ExperimentResult run_compare_comm(const ExperimentConfig &config) {
    const auto &s = config.settings;
    const int n = s.at("num_qubits").get<int>();
    auto model = learner::VariationalModel::create(n, s.at("layers").get<int>(),
                                                   true, 0);
    common::Rng root(config.seed);
    auto model_rng = root.derive("model");
    model.theta = random_theta(model.param_count(), kPi, model_rng);

    auto link = learner::DelegationLink::create(root.derive("link").u64(),
                                                config.shots);
    learner::delegated_evaluate(link, model, sim::basis_state(n, 0),
                                {learner::ShiftSpec{}});
    const auto qhe = protocol::account(link.transcript);

    const auto gates = model.bound_circuit().bound_gates();
    const protocol::BrickworkModel brickwork;
    const auto blind = protocol::blind_baseline_cost(gates, n, brickwork);

    auto summary = base_summary(config);
    summary["gate_count"] = gates.size();
    summary["qhe"] = totals_json(qhe);
    summary["blind_brickwork"] = totals_json(blind);
    summary["brickwork_constants"] = {
        {"single_qubit_slots", brickwork.single_qubit_slots},
        {"cnot_slots", brickwork.cnot_slots},
        {"classical_bits_per_slot", brickwork.classical_bits_per_slot}};
    summary["round_ratio"] = static_cast<double>(blind.rounds) /
                             static_cast<double>(qhe.rounds);

    std::string csv = "variant,qubits_sent,classical_bits,rounds\n";
    csv += "qhe," + std::to_string(qhe.qubits_sent) + "," +
           std::to_string(qhe.classical_bits) + "," +
           std::to_string(qhe.rounds) + "\n";
    csv += "blind_brickwork," + std::to_string(blind.qubits_sent) + "," +
           std::to_string(blind.classical_bits) + "," +
           std::to_string(blind.rounds) + "\n";
    return {summary, csv, link.transcript.to_jsonl()};
}

void write_file(const std::filesystem::path &path, const std::string &bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ResourceError("cannot open " + path.string() + " for writing");
    out << bytes;
}

} // namespace

std::string kind_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::DemoInference:
        return "demo-inference";
    case ExperimentKind::TrainDelegated:
        return "train-delegated";
    case ExperimentKind::TrainFederated:
        return "train-federated";
    case ExperimentKind::DlpKernel:
        return "dlp-kernel";
    case ExperimentKind::AuditPrivacy:
        return "audit-privacy";
    case ExperimentKind::CompareComm:
        return "compare-comm";
    }
    throw DomainError("unknown experiment kind");
}

ExperimentKind parse_kind(const std::string &name) {
    for (const auto kind :
         {ExperimentKind::DemoInference, ExperimentKind::TrainDelegated,
          ExperimentKind::TrainFederated, ExperimentKind::DlpKernel,
          ExperimentKind::AuditPrivacy, ExperimentKind::CompareComm})
        if (kind_name(kind) == name)
            return kind;
    throw ConfigError("kind", "unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json &doc) {
    check_object(doc, "config");
    check_keys(doc, "", {"kind", "seed", "shots", "out_dir", "settings"});
    ExperimentConfig config;
    if (!doc.contains("kind") || !doc.at("kind").is_string())
        throw ConfigError("kind", "required string");
    config.kind = parse_kind(doc.at("kind").get<std::string>());
    const auto get_u64 = [&doc](const char *key) {
        const auto &v = doc.at(key);
        if (!v.is_number_unsigned() &&
            !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ConfigError(key, "must be a non-negative integer");
        return v.get<std::uint64_t>();
    };
    if (doc.contains("seed"))
        config.seed = get_u64("seed");
    if (doc.contains("shots"))
        config.shots = get_u64("shots");
    if (doc.contains("out_dir")) {
        if (!doc.at("out_dir").is_string())
            throw ConfigError("out_dir", "must be a string");
        config.out_dir = doc.at("out_dir").get<std::string>();
    }
    config.settings = normalize_settings(
        config.kind, doc.value("settings", json::object()));
    return config;
}

ExperimentConfig ExperimentConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot read " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error &err) {
        throw ConfigError("config", std::string("invalid JSON: ") + err.what());
    }
    return from_json(doc);
}

json ExperimentConfig::to_json() const {
    return {{"kind", kind_name(kind)},
            {"seed", seed},
            {"shots", shots},
            {"out_dir", out_dir},
            {"settings", normalize_settings(kind, settings)}};
}

void ExperimentConfig::validate() const { (void)to_json(); }

std::uint64_t config_hash(const ExperimentConfig &config) {
    auto doc = config.to_json();
    doc.erase("out_dir"); // the hash names the experiment, not its destination
    return fnv1a64(doc.dump());
}

ExperimentResult run_experiment(const ExperimentConfig &raw) {
    ExperimentConfig config = raw;
    config.settings = normalize_settings(raw.kind, raw.settings);
    switch (config.kind) {
    case ExperimentKind::DemoInference:
        return run_demo_inference(config);
    case ExperimentKind::TrainDelegated:
        return run_train_delegated(config);
    case ExperimentKind::TrainFederated:
        return run_train_federated(config);
    case ExperimentKind::DlpKernel:
        return run_dlp_kernel(config);
    case ExperimentKind::AuditPrivacy:
        return run_audit_privacy(config);
    case ExperimentKind::CompareComm:
        return run_compare_comm(config);
    }
    throw DomainError("unknown experiment kind");
}

ExperimentResult run_and_write(const ExperimentConfig &config) {
    auto result = run_experiment(config);
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "metrics.csv", result.metrics_csv);
    write_file(dir / "transcript.jsonl", result.transcript_jsonl);
    write_file(dir / "summary.json", result.summary.dump(2) + "\n");
    return result;
}

} // namespace qhel::experiment
