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
 * Variational approximation of a Laplacian eigenbasis.
 *
 * The circuit unitary U is trained so that U^dagger L U becomes diagonal; the
 * loss is the squared Frobenius norm of its off-diagonal part. A cyclic
 * Jacobi eigensolver serves as the classical reference.
 */
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qsf/circuit.hpp"
#include "qsf/graph.hpp"

namespace qsf {

struct JacobiResult {
    Eigen::VectorXd eigenvalues;  ///< ascending
    Eigen::MatrixXd eigenvectors; ///< orthogonal, columns match eigenvalues
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
/// Throws DimensionError if `s` is not square or not symmetric within 1e-10.
[[nodiscard]] JacobiResult jacobi_eigendecomposition(const Eigen::MatrixXd &s);

/// sum_{i != j} |(U^dagger L U)_{ij}|^2
[[nodiscard]] double offdiag_loss(const Eigen::MatrixXcd &u, const LaplacianMatrix &lap);

struct EigenApproxConfig {
    int n_layers = 20;
    int iterations = 500;
    double learning_rate = 0.01;
    double alpha_init = 0.5;
    std::uint64_t seed = 42;
    bool finite_difference_gradients = false;
};

struct LossTrace {
    std::vector<double> losses;
};

struct EigenApproxResult {
    QsfCircuit circuit;
    LossTrace trace;
    /// trace(U^dagger L U) at every iteration.
    std::vector<double> conjugated_traces;
};

struct LossAndGradient {
    double loss = 0.0;
    double conjugated_trace = 0.0; ///< trace(U^dagger L U)
    std::vector<double> gradient;
};

/// Off-diagonal loss of the circuit unitary and its adjoint gradient.
[[nodiscard]] LossAndGradient eigenspace_loss_gradient(const QsfCircuit &circuit,
                                                       const LaplacianMatrix &lap);

/// Central differences with the given step; used as a cross-check.
[[nodiscard]] LossAndGradient eigenspace_loss_gradient_fd(const QsfCircuit &circuit,
                                                          const LaplacianMatrix &lap,
                                                          double step = 1e-5);

/**
 * Builds the filter circuit from `connection` (phases mixed with alpha_init)
 * and runs Adam on the off-diagonal loss. The returned trace holds the loss
 * before each update, one entry per iteration.
 */
[[nodiscard]] EigenApproxResult optimize_eigenspace(const LaplacianMatrix &lap,
                                                    const ConnectionMatrix &connection,
                                                    const EigenApproxConfig &config);

/// Sorted diagonal of U^dagger L U.
[[nodiscard]] Eigen::VectorXd recovered_eigenvalues(const QsfCircuit &circuit,
                                                    const LaplacianMatrix &lap);

} // namespace qsf
