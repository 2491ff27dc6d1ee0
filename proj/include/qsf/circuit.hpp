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
 * Layered, graph-connected parameterized QFT filter circuit.
 *
 * One layer is
 *   1. RY(theta_q) on every qubit,
 *   2. CRY(c -> t) once per connected pair, control = smaller index,
 *   3. a QFT ladder: for q = 0..n-1, H(q) then CPhase(c -> q) for every
 *      connected c > q.
 * No bit-reversal swaps are appended.
 */
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsf/gates.hpp"
#include "qsf/graph.hpp"
#include "qsf/random.hpp"
#include "qsf/statevector.hpp"

namespace qsf {

/// Largest circuit that circuit_unitary will materialize.
inline constexpr int kMatrixModeMaxQubits = 12;

struct Gate {
    GateKind kind = GateKind::Hadamard;
    int target = 0;
    int control = -1;
    int param = -1;      ///< index into the parameter view, -1 for fixed gates
    double scale = 1.0;  ///< angle = scale * params[param] + offset
    double offset = 0.0;
};

struct QsfCircuit {
    int n_qubits = 0;
    int n_layers = 0;
    std::vector<Gate> gates;
    std::vector<double> params; ///< flat learnable parameter view

    [[nodiscard]] double angle(const Gate &g) const {
        return g.param < 0 ? g.offset : g.scale * params[g.param] + g.offset;
    }
    [[nodiscard]] std::size_t parameter_count() const { return params.size(); }
};

/// Parameters per layer in the dense (fully connected) layout: n_q^2.
[[nodiscard]] std::size_t dense_layer_parameters(int n_qubits);

/// n_layers * n_q^2.
[[nodiscard]] std::size_t parameter_count(int n_qubits, int n_layers);

/// Counts the gates build_circuit would emit for this connection matrix.
[[nodiscard]] std::size_t parameter_count(const ConnectionMatrix &connection, int n_layers);

/**
 * Circuit with one parameter per emitted gate. RY/CRY angles start uniform in
 * [-0.1, 0.1] (drawn from `rng` layer by layer); controlled phases start at
 * phase[c, q].
 */
[[nodiscard]] QsfCircuit build_circuit(const ConnectionMatrix &connection,
                                       const PhaseMatrix &phase, int n_layers, Rng &rng);

/**
 * Initial values for the dense shared layout used by the hybrid model:
 * per layer n_q RY angles, n_q(n_q-1)/2 CRY angles (pairs c < t in
 * lexicographic order) and n_q(n_q-1)/2 phases (QFT ladder order).
 */
[[nodiscard]] std::vector<double> init_shared_parameters(int n_qubits, int n_layers,
                                                         const PhaseMatrix &phase_draw,
                                                         Rng &rng);

/**
 * Binds a sample's connection matrix to the dense shared parameter vector.
 * Each phase gate gets angle (1 - alpha) * theta + alpha * M[c, q]. Gates
 * whose connection entry is zero are left out; their slots get zero gradient.
 */
[[nodiscard]] QsfCircuit bind_shared_circuit(const ConnectionMatrix &connection, int n_layers,
                                             std::span<const double> shared, double alpha);

/// Applies every gate in order. Throws DimensionError on qubit-count mismatch.
[[nodiscard]] StateVector apply_circuit(const QsfCircuit &circuit, StateVector state);

/// Gate-wise inverse: gates reversed with negated angles.
[[nodiscard]] QsfCircuit inverse_circuit(const QsfCircuit &circuit);

/// Dense 2^n x 2^n unitary. Throws CapacityError above kMatrixModeMaxQubits.
[[nodiscard]] Eigen::MatrixXcd circuit_unitary(const QsfCircuit &circuit);

/// Left-multiplies every column of `columns` by the circuit.
void apply_circuit_columns(const QsfCircuit &circuit, Eigen::MatrixXcd &columns);

} // namespace qsf
