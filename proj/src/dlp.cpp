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

#include "qhel/dlp/dlp.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "qhel/crypto/sealed_port.hpp"
#include "qhel/crypto/vault.hpp"
#include "qhel/sim/measure.hpp"

namespace qhel::dlp {

namespace {

constexpr std::uint32_t kMaxPrime = 1u << 16;

void check_prime(std::uint32_t p) {
    if (p > kMaxPrime)
        throw ResourceError("modulus exceeds the desk-scale prime cap");
    if (!is_prime(p))
        throw DomainError("modulus must be prime");
}

void check_unit(const DlpGroup &group, std::uint32_t x) {
    if (x < 1 || x >= group.p)
        throw DomainError("element is not a unit modulo p");
}

void check_feature(const DlpGroup &group, const FeatureConfig &cfg) {
    if (cfg.k < 1)
        throw ConfigError("feature.k", "orbit exponent must be at least 1");
    if (cfg.k >= 32 || (std::uint64_t{1} << cfg.k) > group.p - 1)
        throw ConfigError("feature.k", "2^k exceeds the group order");
}

/// The orbit {x a^j : j < 2^k}, in orbit order.
std::vector<std::uint32_t> orbit_of(const DlpGroup &group, const FeatureConfig &cfg,
                                    std::uint32_t x) {
    check_unit(group, x);
    check_feature(group, cfg);
    std::vector<std::uint32_t> orbit;
    orbit.reserve(std::size_t{1} << cfg.k);
    std::uint64_t cur = x;
    for (std::uint64_t j = 0; j < (std::uint64_t{1} << cfg.k); ++j) {
        orbit.push_back(static_cast<std::uint32_t>(cur));
        cur = cur * group.a % group.p;
    }
    return orbit;
}

} // namespace

bool is_prime(std::uint32_t p) {
    if (p < 2)
        return false;
    for (std::uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

std::uint32_t find_generator(std::uint32_t p) {
    check_prime(p);
    if (p == 2)
        return 1;
    for (std::uint32_t a = 2; a < p; ++a) {
        std::uint32_t order = 1;
        std::uint64_t cur = a;
        while (cur != 1) {
            cur = cur * a % p;
            ++order;
        }
        if (order == p - 1)
            return a;
    }
    throw DomainError("no generator found; modulus is not prime");
}

DlpGroup DlpGroup::create(std::uint32_t p) {
    DlpGroup group;
    group.p = p;
    group.a = find_generator(p);
    group.n = 0;
    for (std::uint32_t v = p; v > 0; v >>= 1)
        ++group.n;
    return group;
}

std::uint32_t pow_mod(std::uint32_t x, std::uint32_t e, std::uint32_t p) {
    if (p == 0)
        throw DomainError("modulus must be positive");
    std::uint64_t base = x % p;
    std::uint64_t acc = 1;
    for (; e > 0; e >>= 1) {
        if (e & 1)
            acc = acc * base % p;
        base = base * base % p;
    }
    return static_cast<std::uint32_t>(acc);
}

std::uint32_t dlog_bruteforce(const DlpGroup &group, std::uint32_t x) {
    check_unit(group, x);
    std::uint64_t cur = 1;
    for (std::uint32_t j = 0; j < group.p - 1; ++j) {
        if (cur == x)
            return j;
        cur = cur * group.a % group.p;
    }
    throw DomainError("no discrete log; the group generator is invalid");
}

int concept_label(const Concept &half, std::uint32_t x) {
    const auto p = half.group.p;
    if (p < 3)
        throw DomainError("concepts need an odd prime modulus");
    if (half.i < 1 || half.i >= p)
        throw DomainError("concept index out of range");
    const std::uint32_t d = dlog_bruteforce(half.group, x);
    const std::uint32_t span = p - 1;
    const std::uint32_t rel = (d + span - half.i % span) % span;
    return rel <= (p - 3) / 2 ? 1 : -1;
}

sim::StateVector feature_state(const DlpGroup &group, const FeatureConfig &cfg,
                               std::uint32_t x) {
    const auto orbit = orbit_of(group, cfg, x);
    sim::StateVector state{group.n, sim::AmpVector::Zero(sim::dim_of(group.n))};
    const double amp = std::pow(2.0, -0.5 * cfg.k);
    for (const auto label : orbit)
        state.amps[static_cast<Eigen::Index>(label)] = sim::Complex(amp, 0.0);
    return state;
}

double kernel_entry(const DlpGroup &group, const FeatureConfig &cfg,
                    std::uint32_t x1, std::uint32_t x2) {
    const auto o1 = orbit_of(group, cfg, x1);
    const auto o2 = orbit_of(group, cfg, x2);
    const std::set<std::uint32_t> s1(o1.begin(), o1.end());
    std::size_t shared = 0;
    for (const auto label : o2)
        shared += s1.count(label);
    return static_cast<double>(shared) / static_cast<double>(o1.size());
}

double padded_kernel_entry(const DlpGroup &group, const FeatureConfig &cfg,
                           std::uint32_t x1, std::uint32_t x2,
                           const crypto::PadKey &pad1,
                           const crypto::PadKey &pad2) {
    if (!(pad1 == pad2))
        throw ProtocolError("kernel pair was padded under different keys");
    if (pad1.num_qubits() != group.n)
        throw DomainError("pad width does not match the feature register");
    const auto s1 = crypto::qotp_encrypt(feature_state(group, cfg, x1), pad1);
    const auto s2 = crypto::qotp_encrypt(feature_state(group, cfg, x2), pad2);
    return sim::inner_product(s1, s2).real();
}

void KernelMatrix::validate() const {
    if (gram.rows() != gram.cols())
        throw ValidationError("kernel matrix must be square");
    if (static_cast<std::size_t>(gram.rows()) != samples.size())
        throw ValidationError("kernel matrix size disagrees with its samples");
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        if (std::abs(gram(i, i) - 1.0) > 1e-12)
            throw ValidationError("kernel diagonal must be 1");
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(gram(i, j) - gram(j, i)) > 1e-12)
                throw ValidationError("kernel matrix must be symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(gram);
    if (eigen.eigenvalues().minCoeff() < -1e-8)
        throw ValidationError("kernel matrix must be positive semidefinite");
}

KernelMatrix kernel_matrix(const DlpGroup &group, const FeatureConfig &cfg,
                           const std::vector<std::uint32_t> &samples) {
    if (samples.empty())
        throw DomainError("kernel needs at least one sample");
    const auto n = static_cast<Eigen::Index>(samples.size());
    KernelMatrix out{Eigen::MatrixXd::Zero(n, n), samples};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double value =
                kernel_entry(group, cfg, samples[static_cast<std::size_t>(i)],
                             samples[static_cast<std::size_t>(j)]);
            out.gram(i, j) = value;
            out.gram(j, i) = value;
        }
    return out;
}

namespace {

/// Sealed feature-map gadget: recovers the pair pad and the plaintext
/// element inside the seal, prepares the feature state, and hands back the
/// same-pad encryption of it. The server only ever holds the padded state.
sim::StateVector feature_gadget(const crypto::EvalHandle &handle,
                                const DlpGroup &group, const FeatureConfig &cfg,
                                const common::Bits &masked,
                                const crypto::KeyCiphertext &ct,
                                engine::ServerViewLog *log) {
    const auto pad =
        crypto::PadKey::from_bits(crypto::sealed::gadget_key_view(handle, ct));
    const auto plain_bits = crypto::classical_otp(masked, pad);
    const auto x = static_cast<std::uint32_t>(common::bits_to_uint(plain_bits));
    const auto padded =
        crypto::qotp_encrypt(feature_state(group, cfg, x), pad);
    if (log)
        log->record("feature_gadget",
                    {{"masked", common::bits_to_string(masked)},
                     {"key_ct", ct.hex()},
                     {"dim", padded.dim()}});
    return padded;
}

} // namespace

PipelineResult delegated_kernel_pipeline(const std::vector<std::uint32_t> &samples,
                                         const DlpGroup &group,
                                         const FeatureConfig &cfg,
                                         std::uint64_t seed, std::uint64_t shots) {
    if (samples.empty())
        throw DomainError("kernel needs at least one sample");
    for (const auto x : samples)
        check_unit(group, x);
    check_feature(group, cfg);

    common::Rng root(seed);
    auto vault_rng = root.derive("vault");
    auto client_rng = root.derive("client");
    auto server_rng = root.derive("server");
    const auto keypair = crypto::HEKeypair::create(vault_rng);
    const auto handle = keypair.handle();

    PipelineResult res;
    res.shots = shots;
    const std::uint64_t session = 1;
    const auto n = static_cast<Eigen::Index>(samples.size());

    struct PairJob {
        Eigen::Index row, col;
        common::Bits masked_row, masked_col;
        crypto::KeyCiphertext ct;
    };
    std::vector<PairJob> jobs;

    // Client turn: a fresh shared pad per pair, both elements masked.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const auto pad = crypto::gen_pad(group.n, client_rng);
            res.pad_trace.push_back(pad);
            const auto ct = handle.encrypt(pad.to_bits(), client_rng);
            const auto mask = [&](std::uint32_t x) {
                return crypto::classical_otp(
                    common::uint_to_bits(x, group.n), pad);
            };
            jobs.push_back({i, j, mask(samples[static_cast<std::size_t>(i)]),
                            mask(samples[static_cast<std::size_t>(j)]), ct});
            res.transcript.append(
                protocol::encrypted_sample_classical(session, group.n));
            res.transcript.append(
                protocol::encrypted_sample_classical(session, group.n));
        }
    res.transcript.append(
        protocol::kernel_request(session, static_cast<std::uint64_t>(jobs.size())));

    // Server turn: padded feature states via the sealed gadget, one overlap
    // per pair, all entries in one response.
    res.matrix.gram = Eigen::MatrixXd::Zero(n, n);
    res.matrix.samples = samples;
    for (const auto &job : jobs) {
        const auto s1 =
            feature_gadget(handle, group, cfg, job.masked_row, job.ct, &res.log);
        const auto s2 =
            feature_gadget(handle, group, cfg, job.masked_col, job.ct, &res.log);
        const double overlap = sim::inner_product(s1, s2).real();
        double value = overlap;
        if (shots > 0) {
            const double prob = overlap * overlap;
            std::uint64_t hits = 0;
            for (std::uint64_t t = 0; t < shots; ++t)
                hits += server_rng.bernoulli(prob) ? 1 : 0;
            value = std::sqrt(static_cast<double>(hits) /
                              static_cast<double>(shots));
        }
        res.matrix.gram(job.row, job.col) = value;
        res.matrix.gram(job.col, job.row) = value;
        res.log.record("kernel_entry", {{"row", job.row},
                                        {"col", job.col},
                                        {"value", value}});
    }
    res.transcript.append(protocol::kernel_response(
        session, static_cast<std::uint64_t>(jobs.size())));

    res.measured_bits = protocol::account(res.transcript).classical_bits;
    res.bound_bits = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n) *
                     static_cast<std::uint64_t>(group.n) *
                     (shots > 0 ? shots : 1);
    if (shots == 0)
        res.matrix.validate();
    return res;
}

Eigen::VectorXd train_kernel_classifier(const KernelMatrix &kernel,
                                        const std::vector<int> &labels,
                                        double lambda) {
    kernel.validate();
    if (labels.size() != kernel.samples.size())
        throw DomainError("label count does not match the kernel");
    if (lambda < 0.0)
        throw DomainError("ridge must be non-negative");
    Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1)
            throw DomainError("labels must be +1 or -1");
        y[static_cast<Eigen::Index>(i)] = labels[i];
    }
    const Eigen::MatrixXd system =
        kernel.gram +
        lambda * Eigen::MatrixXd::Identity(kernel.gram.rows(), kernel.gram.cols());
    const Eigen::VectorXd alpha = system.ldlt().solve(y);
    if ((system * alpha - y).lpNorm<Eigen::Infinity>() > 1e-6)
        throw SolverError("kernel system is singular; train with a ridge > 0");
    return alpha;
}

int kernel_predict_row(const Eigen::VectorXd &alpha, const Eigen::VectorXd &row) {
    if (alpha.size() != row.size())
        throw DomainError("coefficient and kernel-row sizes disagree");
    return alpha.dot(row) < 0.0 ? -1 : 1;
}

int kernel_predict(const DlpGroup &group, const FeatureConfig &cfg,
                   const Eigen::VectorXd &alpha,
                   const std::vector<std::uint32_t> &train_samples,
                   std::uint32_t x) {
    if (alpha.size() != static_cast<Eigen::Index>(train_samples.size()))
        throw DomainError("coefficient count does not match the training set");
    Eigen::VectorXd row(alpha.size());
    for (Eigen::Index j = 0; j < row.size(); ++j)
        row[j] = kernel_entry(group, cfg,
                              train_samples[static_cast<std::size_t>(j)], x);
    return kernel_predict_row(alpha, row);
}

std::string kernel_csv(const KernelMatrix &kernel) {
    std::string out;
    char buf[32];
    for (Eigen::Index i = 0; i < kernel.gram.rows(); ++i) {
        for (Eigen::Index j = 0; j < kernel.gram.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.12g", kernel.gram(i, j));
            out += buf;
            out += j + 1 < kernel.gram.cols() ? ',' : '\n';
        }
    }
    return out;
}

} // namespace qhel::dlp
