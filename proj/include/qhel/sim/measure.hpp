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

#pragma once

#include "qhel/common/rng.hpp"
#include "qhel/sim/state_vector.hpp"

namespace qhel::sim {

/// Single-qubit Pauli-Z observable on qubit `k`.
struct PauliZObservable {
    int k = 0;
};

/// Exact <Z_k> = sum_x (-1)^{bit_k(x)} |amp_x|^2, in [-1, 1].
double expectation(const StateVector &state, PauliZObservable obs);

/// <s1|s2>, conjugate-linear in the first argument.
Complex inner_product(const StateVector &s1, const StateVector &s2);

/// Probability that measuring qubit k yields outcome 1.
double prob_one(const StateVector &state, int k);

/// Mean of `shots` +/-1 outcomes drawn from the exact Born distribution.
double sample_z(const StateVector &state, int k, std::uint64_t shots,
                common::Rng &rng);

} // namespace qhel::sim
