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
 * Discrete-logarithm concept class, feature states, and kernel pipeline.
 *
 * Concepts label x in Z_p^* by whether log_a x falls in a half interval
 * (wrapped modulo p - 1). The feature state of x is the uniform
 * superposition over the orbit {x a^j : j < 2^k}, so kernel entries are
 * orbit-overlap fractions. A purely classical client can delegate the
 * whole Gram matrix: it one-time-pads its bitstrings, the server prepares
 * padded feature states through a sealed gadget (a Hadamard layer plus
 * controlled modular-multiplication permutations in the modeled
 * construction), and inner products under a shared pad equal the plaintext
 * kernel exactly.
 *
 * Everything here is desk-scale: dlog is brute-forced, p fits 16 bits.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhel/crypto/pad.hpp"
#include "qhel/engine/server_view.hpp"
#include "qhel/protocol/transcript.hpp"
#include "qhel/sim/state_vector.hpp"

namespace qhel::dlp {

/// Trial-division primality for 16-bit moduli.
bool is_prime(std::uint32_t p);

/// Smallest generator of Z_p^*, by exhaustive order check.
std::uint32_t find_generator(std::uint32_t p);

/// The multiplicative group Z_p^* with a fixed generator.
struct DlpGroup {
    std::uint32_t p = 0; // prime modulus
    std::uint32_t a = 0; // generator
    int n = 0;           // bit length of p

    static DlpGroup create(std::uint32_t p);
};

/// x^e mod p.
std::uint32_t pow_mod(std::uint32_t x, std::uint32_t e, std::uint32_t p);

/// The j in [0, p-2] with a^j = x (mod p). Exists only because p is tiny.
std::uint32_t dlog_bruteforce(const DlpGroup &group, std::uint32_t x);

/// Half-interval labeling in dlog space, anchored at index i.
struct Concept {
    DlpGroup group;
    std::uint32_t i = 1; // 1 <= i <= p-1
};

/// +1 iff log_a x lies in [i, i + (p-3)/2], wrapped modulo p - 1; exactly
/// (p-1)/2 of all x get +1 for every i.
int concept_label(const Concept &half, std::uint32_t x);

struct FeatureConfig {
    int k = 1; // orbit exponent: superposition over 2^k labels, 2^k <= p-1
};

/// Uniform superposition over {x a^j mod p : j < 2^k} on n qubits.
sim::StateVector feature_state(const DlpGroup &group, const FeatureConfig &cfg,
                               std::uint32_t x);

/// <phi(x1)|phi(x2)> = |S_x1 intersect S_x2| / 2^k, via the orbit sets.
double kernel_entry(const DlpGroup &group, const FeatureConfig &cfg,
                    std::uint32_t x1, std::uint32_t x2);

/// Inner product of the two padded feature states. The pads must be the
/// same key or the value is meaningless; a mismatch throws.
double padded_kernel_entry(const DlpGroup &group, const FeatureConfig &cfg,
                           std::uint32_t x1, std::uint32_t x2,
                           const crypto::PadKey &pad1,
                           const crypto::PadKey &pad2);

inline double padded_kernel_entry(const DlpGroup &group, const FeatureConfig &cfg,
                                  std::uint32_t x1, std::uint32_t x2,
                                  const crypto::PadKey &shared_pad) {
    return padded_kernel_entry(group, cfg, x1, x2, shared_pad, shared_pad);
}

struct KernelMatrix {
    Eigen::MatrixXd gram;
    std::vector<std::uint32_t> samples;

    /// Symmetric, unit diagonal, eigenvalues >= -1e-8.
    void validate() const;
};

/// Plaintext Gram matrix over the samples.
KernelMatrix kernel_matrix(const DlpGroup &group, const FeatureConfig &cfg,
                           const std::vector<std::uint32_t> &samples);

struct PipelineResult {
    KernelMatrix matrix;
    protocol::Transcript transcript;
    engine::ServerViewLog log;
    std::vector<crypto::PadKey> pad_trace; // client side, for audits
    std::uint64_t shots = 0;               // 0 = exact inner products
    std::uint64_t measured_bits = 0;       // classical bits actually sent
    std::uint64_t bound_bits = 0;          // N^2 d / eps^2 reference point
};

/// Full delegated Gram-matrix estimation with a purely classical client:
/// per pair one fresh shared pad, both bitstrings one-time-padded, the
/// sealed feature gadget prepares both padded states server-side, and one
/// request/response round returns every entry. With shots > 0 each entry
/// is sqrt of a Born-sampled overlap probability.
PipelineResult delegated_kernel_pipeline(const std::vector<std::uint32_t> &samples,
                                         const DlpGroup &group,
                                         const FeatureConfig &cfg,
                                         std::uint64_t seed,
                                         std::uint64_t shots = 0);

/// Solves (K + lambda I) alpha = y. A residual above 1e-6 reports the
/// system as singular and advises a positive ridge.
Eigen::VectorXd train_kernel_classifier(const KernelMatrix &kernel,
                                        const std::vector<int> &labels,
                                        double lambda);

/// sign(sum_j alpha_j K(train_j, x)); ties resolve to +1.
int kernel_predict(const DlpGroup &group, const FeatureConfig &cfg,
                   const Eigen::VectorXd &alpha,
                   const std::vector<std::uint32_t> &train_samples,
                   std::uint32_t x);

/// Same sign rule on a precomputed kernel row.
int kernel_predict_row(const Eigen::VectorXd &alpha, const Eigen::VectorXd &row);

/// Numeric CSV, one row per line.
std::string kernel_csv(const KernelMatrix &kernel);

} // namespace qhel::dlp
