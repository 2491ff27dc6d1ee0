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
#include "qsf/graph.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsf/error.hpp"

namespace qsf {

void Graph::validate() const {
    const auto n = adjacency.rows();
    if (adjacency.cols() != n) {
        throw DimensionError("adjacency matrix is not square");
    }
    if (node_features.rows() != n) {
        throw DimensionError("feature matrix has " + std::to_string(node_features.rows()) +
                             " rows for " + std::to_string(n) + " nodes");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0) {
            throw DimensionError("adjacency has a self-loop at node " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < i; ++j) {
            if (adjacency(i, j) != adjacency(j, i)) {
                throw DimensionError("adjacency is not symmetric");
            }
            if (adjacency(i, j) < 0.0) {
                throw DimensionError("adjacency has a negative weight");
            }
        }
    }
}

std::uint64_t next_pow2(std::uint64_t x) {
    std::uint64_t p = 1;
    while (p < x) {
        p <<= 1;
    }
    return p;
}

int ceil_log2(std::uint64_t x) {
    int bits = 0;
    while ((std::uint64_t{1} << bits) < x) {
        ++bits;
    }
    return bits;
}

LaplacianMatrix normalized_laplacian(const Eigen::MatrixXd &adjacency) {
    const auto n = adjacency.rows();
    if (adjacency.cols() != n) {
        throw DimensionError("adjacency matrix is not square");
    }
    const Eigen::VectorXd degree = adjacency.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
    }
    LaplacianMatrix lap;
    lap.entries = -(inv_sqrt.asDiagonal() * adjacency * inv_sqrt.asDiagonal());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (degree(i) > 0.0) {
            lap.entries(i, i) += 1.0;
        }
    }
    return lap;
}

LaplacianMatrix normalized_laplacian(const Graph &graph) {
    return normalized_laplacian(graph.adjacency);
}

Graph erdos_renyi(int n_nodes, double edge_prob, std::uint64_t seed) {
    if (n_nodes < 1) {
        throw DimensionError("erdos_renyi needs at least one node");
    }
    Rng rng(seed);
    Graph g;
    g.adjacency = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    g.node_features = Eigen::MatrixXd::Zero(n_nodes, 0);
    for (int i = 0; i < n_nodes; ++i) {
        for (int j = i + 1; j < n_nodes; ++j) {
            // Always consume one draw per pair so p = 0 and p = 1 stay in step.
            if (rng.uniform() < edge_prob) {
                g.adjacency(i, j) = 1.0;
                g.adjacency(j, i) = 1.0;
            }
        }
    }
    return g;
}

Graph pad_graph(const Graph &graph, int target_nodes, int target_feat_dim) {
    const int n = graph.n_nodes();
    const int d = graph.feature_dim();
    if (target_nodes < n || target_feat_dim < d) {
        throw DimensionError("cannot pad graph of " + std::to_string(n) + "x" +
                             std::to_string(d) + " down to " + std::to_string(target_nodes) +
                             "x" + std::to_string(target_feat_dim));
    }
    Graph out;
    out.label = graph.label;
    out.adjacency = Eigen::MatrixXd::Zero(target_nodes, target_nodes);
    out.adjacency.topLeftCorner(n, n) = graph.adjacency;
    out.node_features = Eigen::MatrixXd::Zero(target_nodes, target_feat_dim);
    out.node_features.topLeftCorner(n, d) = graph.node_features;
    return out;
}

ConnectionMatrix qubit_connection_matrix(const Eigen::MatrixXd &adjacency, int n_qubits) {
    const auto n = adjacency.rows();
    if (n_qubits < 0 || n_qubits > 30) {
        throw CapacityError("qubit count out of range: " + std::to_string(n_qubits));
    }
    const auto capacity = Eigen::Index{1} << n_qubits;
    if (n > capacity) {
        throw CapacityError(std::to_string(n) + " nodes do not fit in " +
                            std::to_string(n_qubits) + " qubits");
    }
    // bits(i, c) = 1 when bit c (big-endian) of node i is set; M = B^T A' B / N.
    Eigen::MatrixXd bits = Eigen::MatrixXd::Zero(n, n_qubits);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int c = 0; c < n_qubits; ++c) {
            bits(i, c) = static_cast<double>((i >> (n_qubits - 1 - c)) & 1);
        }
    }
    Eigen::MatrixXd off = adjacency;
    off.diagonal().setZero();
    ConnectionMatrix m;
    m.entries = bits.transpose() * off * bits / static_cast<double>(capacity);
    return m;
}

PhaseMatrix random_phases(int n_qubits, Rng &rng) {
    PhaseMatrix draw;
    draw.entries.resize(n_qubits, n_qubits);
    for (int c = 0; c < n_qubits; ++c) {
        for (int t = 0; t < n_qubits; ++t) {
            draw.entries(c, t) = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
    }
    return draw;
}

PhaseMatrix mix_phases(const ConnectionMatrix &connection, const PhaseMatrix &draw,
                       double alpha_init) {
    if (alpha_init < 0.0 || alpha_init > 1.0) {
        throw ConfigError("alpha_init must lie in [0, 1]");
    }
    if (draw.entries.rows() != connection.entries.rows() ||
        draw.entries.cols() != connection.entries.cols()) {
        throw DimensionError("phase draw and connection matrix differ in shape");
    }
    PhaseMatrix phase;
    phase.entries = (1.0 - alpha_init) * draw.entries + alpha_init * connection.entries;
    return phase;
}

PhaseMatrix init_phase_matrix(const ConnectionMatrix &connection, double alpha_init,
                              Rng &rng) {
    return mix_phases(connection, random_phases(connection.n_qubits(), rng), alpha_init);
}

ConnectionMatrix add_connection_noise(const ConnectionMatrix &connection, double noise_low,
                                      double noise_high, Rng &rng) {
    if (!(noise_low > 0.0) || noise_high < noise_low) {
        throw ConfigError("connection noise range must satisfy 0 < low <= high");
    }
    ConnectionMatrix out = connection;
    for (Eigen::Index c = 0; c < out.entries.rows(); ++c) {
        for (Eigen::Index t = 0; t < out.entries.cols(); ++t) {
            out.entries(c, t) += rng.uniform(noise_low, noise_high);
        }
    }
    return out;
}

} // namespace qsf
