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
 * Graphs, normalized Laplacians and the graph-to-qubit contraction that
 * decides which entangling gates a filter circuit carries.
 */
#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "qsf/random.hpp"

namespace qsf {

/// Undirected weighted graph with per-node features and a class label.
struct Graph {
    Eigen::MatrixXd adjacency;     ///< N x N, symmetric, zero diagonal, >= 0
    Eigen::MatrixXd node_features; ///< N x d
    int label = 0;

    [[nodiscard]] int n_nodes() const {
        return static_cast<int>(adjacency.rows());
    }
    [[nodiscard]] int feature_dim() const {
        return static_cast<int>(node_features.cols());
    }

    /// Throws DimensionError if the adjacency invariants do not hold.
    void validate() const;
};

struct LaplacianMatrix {
    Eigen::MatrixXd entries;
    [[nodiscard]] int size() const { return static_cast<int>(entries.rows()); }
};

/// n_q x n_q contraction of an adjacency matrix onto qubit pairs.
struct ConnectionMatrix {
    Eigen::MatrixXd entries;
    [[nodiscard]] int n_qubits() const {
        return static_cast<int>(entries.rows());
    }
    /// True when the (control, target) pair carries a gate.
    [[nodiscard]] bool connected(int control, int target) const {
        return entries(control, target) != 0.0;
    }
};

/// Initial controlled-phase angles in radians, indexed [control, target].
struct PhaseMatrix {
    Eigen::MatrixXd entries;
};

[[nodiscard]] constexpr bool is_pow2(std::uint64_t x) {
    return x != 0 && (x & (x - 1)) == 0;
}

/// Smallest power of two >= x (1 for x <= 1).
[[nodiscard]] std::uint64_t next_pow2(std::uint64_t x);

/// ceil(log2(x)) for x >= 1.
[[nodiscard]] int ceil_log2(std::uint64_t x);

/// L = I - D^{-1/2} A D^{-1/2}. Rows and columns of isolated nodes are zero.
[[nodiscard]] LaplacianMatrix normalized_laplacian(const Eigen::MatrixXd &adjacency);
[[nodiscard]] LaplacianMatrix normalized_laplacian(const Graph &graph);

/// G(n, p): each unordered pair is an edge independently with probability p.
[[nodiscard]] Graph erdos_renyi(int n_nodes, double edge_prob, std::uint64_t seed);

/// Extends adjacency and features with zero rows/columns.
[[nodiscard]] Graph pad_graph(const Graph &graph, int target_nodes, int target_feat_dim);

/**
 * Contracts an N x N adjacency onto n_q qubits.
 *
 * M[c,t] accumulates A[i,j] / 2^n_q over every ordered pair (i,j) where bit c
 * of i and bit t of j are set. Bits are read big-endian over n_q positions,
 * so qubit 0 is the most significant bit of the node index. Diagonal entries
 * of A are ignored.
 */
[[nodiscard]] ConnectionMatrix qubit_connection_matrix(const Eigen::MatrixXd &adjacency,
                                                       int n_qubits);

/// Uniform draws in [0, 2pi), row-major.
[[nodiscard]] PhaseMatrix random_phases(int n_qubits, Rng &rng);

/// (1 - alpha) * draw + alpha * M.
[[nodiscard]] PhaseMatrix mix_phases(const ConnectionMatrix &connection,
                                     const PhaseMatrix &draw, double alpha_init);

/// random_phases followed by mix_phases.
[[nodiscard]] PhaseMatrix init_phase_matrix(const ConnectionMatrix &connection,
                                            double alpha_init, Rng &rng);

/// Adds U[noise_low, noise_high] to every entry so every qubit pair is connected.
[[nodiscard]] ConnectionMatrix add_connection_noise(const ConnectionMatrix &connection,
                                                    double noise_low, double noise_high,
                                                    Rng &rng);

} // namespace qsf
