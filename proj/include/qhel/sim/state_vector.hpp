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
 * Dense statevector type for exact few-qubit simulation.
 *
 * Bit ordering is little-endian throughout: qubit i is bit i of the
 * basis-state integer label, so qubit 0 is the least significant bit.
 * State equality is always up to global phase, |<u|v>| = 1.
 */

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "qhel/common/errors.hpp"

namespace qhel::sim {

using Complex = std::complex<double>;
using AmpVector = Eigen::VectorXcd;

/// Dense statevectors are capped at this many qubits.
inline constexpr int kMaxQubits = 20;

/// Normalized complex amplitude vector over `num_qubits` qubits.
struct StateVector {
    int num_qubits = 0;
    AmpVector amps;

    Eigen::Index dim() const { return amps.size(); }
};

inline Eigen::Index dim_of(int num_qubits) {
    return Eigen::Index{1} << num_qubits;
}

inline void check_qubit_count(int n) {
    if (n < 1)
        throw DomainError("qubit count must be >= 1");
    if (n > kMaxQubits)
        throw ResourceError("qubit count exceeds the dense-statevector cap");
}

/// |x> on n qubits.
inline StateVector basis_state(int n, std::uint64_t x) {
    check_qubit_count(n);
    const Eigen::Index d = dim_of(n);
    if (x >= static_cast<std::uint64_t>(d))
        throw DomainError("basis label out of range for qubit count");
    StateVector s{n, AmpVector::Zero(d)};
    s.amps[static_cast<Eigen::Index>(x)] = Complex(1.0, 0.0);
    return s;
}

/// State from a raw amplitude vector; normalizes and validates the length.
StateVector state_from_amplitudes(AmpVector amps);

/// Max |<u|v>| test for equality up to global phase.
inline double fidelity(const StateVector &u, const StateVector &v) {
    if (u.num_qubits != v.num_qubits)
        throw DomainError("fidelity: qubit counts differ");
    return std::abs(u.amps.dot(v.amps));
}

inline double norm_error(const StateVector &s) {
    return std::abs(s.amps.norm() - 1.0);
}

} // namespace qhel::sim
