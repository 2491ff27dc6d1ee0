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
#include "qsf/circuit.hpp"

#include <algorithm>
#include <string>

#include "qsf/error.hpp"

namespace qsf {

namespace {

bool pair_connected(const ConnectionMatrix &m, int a, int b) {
    return m.connected(a, b) || m.connected(b, a);
}

void check_square(const Eigen::MatrixXd &m, int n, const char *what) {
    if (m.rows() != n || m.cols() != n) {
        throw DimensionError(std::string(what) + " must be " + std::to_string(n) + "x" +
                             std::to_string(n));
    }
}

} // namespace

std::size_t dense_layer_parameters(int n_qubits) {
    const auto n = static_cast<std::size_t>(n_qubits);
    return n + n * (n - 1);
}

std::size_t parameter_count(int n_qubits, int n_layers) {
    return static_cast<std::size_t>(n_layers) * dense_layer_parameters(n_qubits);
}

std::size_t parameter_count(const ConnectionMatrix &connection, int n_layers) {
    const int n = connection.n_qubits();
    std::size_t per_layer = n;
    for (int c = 0; c < n; ++c) {
        for (int t = c + 1; t < n; ++t) {
            per_layer += pair_connected(connection, c, t) ? 1 : 0;
            per_layer += connection.connected(t, c) ? 1 : 0;
        }
    }
    return per_layer * static_cast<std::size_t>(n_layers);
}

QsfCircuit build_circuit(const ConnectionMatrix &connection, const PhaseMatrix &phase,
                         int n_layers, Rng &rng) {
    const int n = connection.n_qubits();
    check_square(phase.entries, n, "phase matrix");
    if (n < 1 || n_layers < 1) {
        throw ConfigError("circuit needs at least one qubit and one layer");
    }
    QsfCircuit circ;
    circ.n_qubits = n;
    circ.n_layers = n_layers;
    auto add_param = [&](double value) {
        circ.params.push_back(value);
        return static_cast<int>(circ.params.size() - 1);
    };
    for (int layer = 0; layer < n_layers; ++layer) {
        for (int q = 0; q < n; ++q) {
            circ.gates.push_back({GateKind::RY, q, -1, add_param(rng.uniform(-0.1, 0.1))});
        }
        for (int c = 0; c < n; ++c) {
            for (int t = c + 1; t < n; ++t) {
                if (pair_connected(connection, c, t)) {
                    circ.gates.push_back(
                        {GateKind::CRY, t, c, add_param(rng.uniform(-0.1, 0.1))});
                }
            }
        }
        for (int q = 0; q < n; ++q) {
            circ.gates.push_back({GateKind::Hadamard, q});
            for (int c = q + 1; c < n; ++c) {
                if (connection.connected(c, q)) {
                    circ.gates.push_back(
                        {GateKind::CPhase, q, c, add_param(phase.entries(c, q))});
                }
            }
        }
    }
    return circ;
}

std::vector<double> init_shared_parameters(int n_qubits, int n_layers,
                                           const PhaseMatrix &phase_draw, Rng &rng) {
    check_square(phase_draw.entries, n_qubits, "phase draw");
    std::vector<double> params;
    params.reserve(parameter_count(n_qubits, n_layers));
    const int pairs = n_qubits * (n_qubits - 1) / 2;
    for (int layer = 0; layer < n_layers; ++layer) {
        for (int k = 0; k < n_qubits + pairs; ++k) {
            params.push_back(rng.uniform(-0.1, 0.1));
        }
        for (int q = 0; q < n_qubits; ++q) {
            for (int c = q + 1; c < n_qubits; ++c) {
                params.push_back(phase_draw.entries(c, q));
            }
        }
    }
    return params;
}

QsfCircuit bind_shared_circuit(const ConnectionMatrix &connection, int n_layers,
                               std::span<const double> shared, double alpha) {
    const int n = connection.n_qubits();
    if (shared.size() != parameter_count(n, n_layers)) {
        throw DimensionError("shared parameter vector has " + std::to_string(shared.size()) +
                             " entries, expected " +
                             std::to_string(parameter_count(n, n_layers)));
    }
    QsfCircuit circ;
    circ.n_qubits = n;
    circ.n_layers = n_layers;
    circ.params.assign(shared.begin(), shared.end());
    int slot = 0;
    for (int layer = 0; layer < n_layers; ++layer) {
        for (int q = 0; q < n; ++q) {
            circ.gates.push_back({GateKind::RY, q, -1, slot++});
        }
        for (int c = 0; c < n; ++c) {
            for (int t = c + 1; t < n; ++t) {
                const int p = slot++;
                if (pair_connected(connection, c, t)) {
                    circ.gates.push_back({GateKind::CRY, t, c, p});
                }
            }
        }
        for (int q = 0; q < n; ++q) {
            circ.gates.push_back({GateKind::Hadamard, q});
            for (int c = q + 1; c < n; ++c) {
                const int p = slot++;
                if (connection.connected(c, q)) {
                    circ.gates.push_back({GateKind::CPhase, q, c, p, 1.0 - alpha,
                                          alpha * connection.entries(c, q)});
                }
            }
        }
    }
    return circ;
}

StateVector apply_circuit(const QsfCircuit &circuit, StateVector state) {
    if (state.n_qubits() != circuit.n_qubits) {
        throw DimensionError("circuit has " + std::to_string(circuit.n_qubits) +
                             " qubits, state has " + std::to_string(state.n_qubits()));
    }
    for (const Gate &g : circuit.gates) {
        apply_gate(state.amplitudes(), circuit.n_qubits, g.kind, g.target, g.control,
                   circuit.angle(g));
    }
    return state;
}

QsfCircuit inverse_circuit(const QsfCircuit &circuit) {
    QsfCircuit inv = circuit;
    std::reverse(inv.gates.begin(), inv.gates.end());
    for (Gate &g : inv.gates) {
        g.scale = -g.scale;
        g.offset = -g.offset;
    }
    return inv;
}

void apply_circuit_columns(const QsfCircuit &circuit, Eigen::MatrixXcd &columns) {
    const auto dim = Eigen::Index{1} << circuit.n_qubits;
    if (columns.rows() != dim) {
        throw DimensionError("column height does not match circuit dimension");
    }
    for (const Gate &g : circuit.gates) {
        const double angle = circuit.angle(g);
        for (Eigen::Index col = 0; col < columns.cols(); ++col) {
            apply_gate({columns.col(col).data(), static_cast<std::size_t>(dim)},
                       circuit.n_qubits, g.kind, g.target, g.control, angle);
        }
    }
}

Eigen::MatrixXcd circuit_unitary(const QsfCircuit &circuit) {
    if (circuit.n_qubits > kMatrixModeMaxQubits) {
        throw CapacityError("circuit_unitary is capped at " +
                            std::to_string(kMatrixModeMaxQubits) + " qubits (got " +
                            std::to_string(circuit.n_qubits) +
                            "); use apply_circuit on a state instead");
    }
    const auto dim = Eigen::Index{1} << circuit.n_qubits;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    apply_circuit_columns(circuit, u);
    return u;
}

} // namespace qsf
