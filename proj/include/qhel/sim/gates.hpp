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
 * Gate descriptions and their action on statevectors.
 *
 * Conventions fixed here and relied on everywhere else:
 *   Rz(t) = diag(e^{-it/2}, e^{+it/2})
 *   Ry(t) = [[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]
 * so that <Z> of Ry(t)|0> is cos(t).
 */

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhel/sim/state_vector.hpp"

namespace qhel::sim {

enum class GateKind { X, Z, H, S, T, Rz, Ry, Cnot, Perm };

/// Permutation table over basis labels {0, ..., 2^n - 1}; checked bijection.
class PermTable {
  public:
    explicit PermTable(std::vector<std::uint32_t> map);
    const std::vector<std::uint32_t> &map() const { return map_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(map_.size()); }

  private:
    std::vector<std::uint32_t> map_;
};

/// One gate acting on named qubits (or the whole register for Perm).
struct GateOp {
    GateKind kind;
    int target = -1;
    int control = -1; // Cnot only
    double theta = 0.0;
    std::shared_ptr<const PermTable> perm;

    static GateOp x(int q) { return {GateKind::X, q, -1, 0.0, nullptr}; }
    static GateOp z(int q) { return {GateKind::Z, q, -1, 0.0, nullptr}; }
    static GateOp h(int q) { return {GateKind::H, q, -1, 0.0, nullptr}; }
    static GateOp s(int q) { return {GateKind::S, q, -1, 0.0, nullptr}; }
    static GateOp t(int q) { return {GateKind::T, q, -1, 0.0, nullptr}; }
    static GateOp rz(int q, double theta) {
        return {GateKind::Rz, q, -1, theta, nullptr};
    }
    static GateOp ry(int q, double theta) {
        return {GateKind::Ry, q, -1, theta, nullptr};
    }
    static GateOp cnot(int control, int target) {
        return {GateKind::Cnot, target, control, 0.0, nullptr};
    }
    static GateOp permutation(std::vector<std::uint32_t> map) {
        GateOp g{GateKind::Perm, -1, -1, 0.0,
                 std::make_shared<const PermTable>(std::move(map))};
        return g;
    }
};

std::string gate_name(GateKind kind);

/// Applies `gate` to `state` and returns the new state. Pure; norm preserved.
StateVector apply(const StateVector &state, const GateOp &gate);

/// Applies a gate list in order.
StateVector apply_all(const StateVector &state, const std::vector<GateOp> &gates);

/// Full 2^n x 2^n unitary of `gate` on an n-qubit register, built by
/// applying the gate to each basis column. Intended for small n.
Eigen::MatrixXcd gate_matrix(const GateOp &gate, int num_qubits);

} // namespace qhel::sim
