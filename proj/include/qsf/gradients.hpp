// Copyright 2026 The QSF Authors
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
 * Reverse-mode (adjoint) gradients of circuit parameters.
 *
 * For a real loss of the final state with co-state lambda, where
 * dLoss = 2 Re <lambda | d psi>, the gate-k contribution is
 * 2 Re <lambda_k | dG_k psi_{k-1}>. Both the state and the co-state are
 * walked back through G_k^dagger, so the cost is about three forward passes
 * regardless of the parameter count.
 */
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsf/circuit.hpp"
#include "qsf/statevector.hpp"

namespace qsf {

/**
 * Adds dLoss/dparams into `grad` (sized circuit.parameter_count()).
 *
 * `outputs` holds circuit outputs column by column and `costates` the
 * matching co-states. Both are consumed.
 */
void adjoint_accumulate(const QsfCircuit &circuit, Eigen::MatrixXcd outputs,
                        Eigen::MatrixXcd costates, std::span<double> grad);

/**
 * Gradient of sum_q upstream[q] * P(qubit q = 1) with respect to every
 * parameter, given the circuit output state.
 */
[[nodiscard]] std::vector<double> marginal_gradients(const QsfCircuit &circuit,
                                                     const StateVector &output,
                                                     std::span<const double> upstream);

/// Same as marginal_gradients but runs the forward pass from `input`.
[[nodiscard]] std::vector<double> circuit_gradients(const QsfCircuit &circuit,
                                                    const StateVector &input,
                                                    std::span<const double> upstream);

} // namespace qsf
