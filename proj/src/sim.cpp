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

#include <algorithm>
#include <cmath>

#include "qhel/sim/gates.hpp"
#include "qhel/sim/measure.hpp"
#include "qhel/sim/state_vector.hpp"

namespace qhel::sim {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

void check_target(const StateVector &state, int q, const char *what) {
    if (q < 0 || q >= state.num_qubits)
        throw DomainError(std::string(what) + ": qubit index out of range");
}

// Visits every pair (x0, x1) differing only in bit q.
template <typename F>
void for_each_pair(Eigen::Index dim, int q, F &&f) {
    const Eigen::Index stride = Eigen::Index{1} << q;
    for (Eigen::Index base = 0; base < dim; base += 2 * stride)
        for (Eigen::Index low = 0; low < stride; ++low)
            f(base + low, base + low + stride);
}

} // namespace

PermTable::PermTable(std::vector<std::uint32_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
        if (v >= map_.size() || seen[v])
            throw ValidationError("permutation table is not a bijection");
        seen[v] = true;
    }
}

std::string gate_name(GateKind kind) {
    switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::T: return "T";
    case GateKind::Rz: return "Rz";
    case GateKind::Ry: return "Ry";
    case GateKind::Cnot: return "CNOT";
    case GateKind::Perm: return "Perm";
    }
    return "?";
}

StateVector state_from_amplitudes(AmpVector amps) {
    const Eigen::Index d = amps.size();
    if (d < 2 || (d & (d - 1)) != 0)
        throw DomainError("amplitude vector length must be a power of two >= 2");
    int n = 0;
    while ((Eigen::Index{1} << n) < d)
        ++n;
    check_qubit_count(n);
    const double norm = amps.norm();
    if (norm == 0.0)
        throw DomainError("cannot normalize the zero vector");
    return StateVector{n, amps / norm};
}

StateVector apply(const StateVector &state, const GateOp &gate) {
    StateVector out = state;
    AmpVector &a = out.amps;
    const Eigen::Index d = state.dim();

    switch (gate.kind) {
    case GateKind::X: {
        check_target(state, gate.target, "X");
        for_each_pair(d, gate.target, [&](Eigen::Index i0, Eigen::Index i1) {
            std::swap(a[i0], a[i1]);
        });
        break;
    }
    case GateKind::Z: {
        check_target(state, gate.target, "Z");
        for_each_pair(d, gate.target,
                      [&](Eigen::Index, Eigen::Index i1) { a[i1] = -a[i1]; });
        break;
    }
    case GateKind::H: {
        check_target(state, gate.target, "H");
        for_each_pair(d, gate.target, [&](Eigen::Index i0, Eigen::Index i1) {
            const Complex v0 = a[i0], v1 = a[i1];
            a[i0] = kSqrt1_2 * (v0 + v1);
            a[i1] = kSqrt1_2 * (v0 - v1);
        });
        break;
    }
    case GateKind::S: {
        check_target(state, gate.target, "S");
        const Complex phase(0.0, 1.0);
        for_each_pair(d, gate.target,
                      [&](Eigen::Index, Eigen::Index i1) { a[i1] *= phase; });
        break;
    }
    case GateKind::T: {
        check_target(state, gate.target, "T");
        const Complex phase = std::polar(1.0, M_PI / 4.0);
        for_each_pair(d, gate.target,
                      [&](Eigen::Index, Eigen::Index i1) { a[i1] *= phase; });
        break;
    }
    case GateKind::Rz: {
        check_target(state, gate.target, "Rz");
        const Complex p0 = std::polar(1.0, -gate.theta / 2.0);
        const Complex p1 = std::polar(1.0, +gate.theta / 2.0);
        for_each_pair(d, gate.target, [&](Eigen::Index i0, Eigen::Index i1) {
            a[i0] *= p0;
            a[i1] *= p1;
        });
        break;
    }
    case GateKind::Ry: {
        check_target(state, gate.target, "Ry");
        const double c = std::cos(gate.theta / 2.0);
        const double s = std::sin(gate.theta / 2.0);
        for_each_pair(d, gate.target, [&](Eigen::Index i0, Eigen::Index i1) {
            const Complex v0 = a[i0], v1 = a[i1];
            a[i0] = c * v0 - s * v1;
            a[i1] = s * v0 + c * v1;
        });
        break;
    }
    case GateKind::Cnot: {
        check_target(state, gate.target, "CNOT target");
        check_target(state, gate.control, "CNOT control");
        if (gate.control == gate.target)
            throw DomainError("CNOT control equals target");
        const Eigen::Index cbit = Eigen::Index{1} << gate.control;
        const Eigen::Index tbit = Eigen::Index{1} << gate.target;
        for (Eigen::Index x = 0; x < d; ++x)
            if ((x & cbit) != 0 && (x & tbit) == 0)
                std::swap(a[x], a[x | tbit]);
        break;
    }
    case GateKind::Perm: {
        if (!gate.perm)
            throw ValidationError("Perm gate carries no table");
        if (gate.perm->dim() != d)
            throw DomainError("Perm table size does not match the register");
        const auto &pi = gate.perm->map();
        AmpVector permuted(d);
        for (Eigen::Index x = 0; x < d; ++x)
            permuted[static_cast<Eigen::Index>(pi[static_cast<std::size_t>(x)])] =
                state.amps[x];
        out.amps = std::move(permuted);
        break;
    }
    }
    return out;
}

StateVector apply_all(const StateVector &state, const std::vector<GateOp> &gates) {
    StateVector s = state;
    for (const auto &g : gates)
        s = apply(s, g);
    return s;
}

Eigen::MatrixXcd gate_matrix(const GateOp &gate, int num_qubits) {
    const Eigen::Index d = dim_of(num_qubits);
    Eigen::MatrixXcd u(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
        StateVector e = basis_state(num_qubits, static_cast<std::uint64_t>(col));
        u.col(col) = apply(e, gate).amps;
    }
    return u;
}

double expectation(const StateVector &state, PauliZObservable obs) {
    check_target(state, obs.k, "Z observable");
    const Eigen::Index kbit = Eigen::Index{1} << obs.k;
    double value = 0.0;
    for (Eigen::Index x = 0; x < state.dim(); ++x) {
        const double p = std::norm(state.amps[x]);
        value += (x & kbit) ? -p : p;
    }
    return value;
}

Complex inner_product(const StateVector &s1, const StateVector &s2) {
    if (s1.num_qubits != s2.num_qubits)
        throw DomainError("inner_product: qubit counts differ");
    return s1.amps.dot(s2.amps);
}

double prob_one(const StateVector &state, int k) {
    check_target(state, k, "prob_one");
    const Eigen::Index kbit = Eigen::Index{1} << k;
    double p1 = 0.0;
    for (Eigen::Index x = 0; x < state.dim(); ++x)
        if (x & kbit)
            p1 += std::norm(state.amps[x]);
    return std::min(1.0, p1);
}

double sample_z(const StateVector &state, int k, std::uint64_t shots,
                common::Rng &rng) {
    if (shots == 0)
        throw DomainError("sample_z: shots must be >= 1");
    const double p1 = prob_one(state, k);
    std::int64_t sum = 0;
    for (std::uint64_t i = 0; i < shots; ++i)
        sum += rng.bernoulli(p1) ? -1 : +1;
    return static_cast<double>(sum) / static_cast<double>(shots);
}

} // namespace qhel::sim
