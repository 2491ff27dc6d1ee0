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
#include "qsf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qsf/error.hpp"
#include "qsf/gradients.hpp"
#include "qsf/optim.hpp"

namespace qsf {

namespace {

double off_norm2(const Eigen::MatrixXd &a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += a(i, j) * a(i, j);
            }
        }
    }
    return s;
}

Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd &u, const LaplacianMatrix &lap) {
    if (u.rows() != lap.entries.rows() || u.cols() != lap.entries.cols()) {
        throw DimensionError("unitary is " + std::to_string(u.rows()) + "x" +
                             std::to_string(u.cols()) + " but Laplacian is " +
                             std::to_string(lap.size()) + "x" + std::to_string(lap.size()));
    }
    return u.adjoint() * lap.entries.cast<Complex>() * u;
}

void check_matrix_mode(const LaplacianMatrix &lap, int n_qubits) {
    if (n_qubits > kMatrixModeMaxQubits) {
        throw CapacityError("eigenspace optimization needs matrix mode, capped at " +
                            std::to_string(kMatrixModeMaxQubits) + " qubits");
    }
    if (lap.size() != (1 << n_qubits)) {
        throw DimensionError("Laplacian dimension " + std::to_string(lap.size()) +
                             " does not equal 2^" + std::to_string(n_qubits));
    }
}

} // namespace

JacobiResult jacobi_eigendecomposition(const Eigen::MatrixXd &s) {
    const auto n = s.rows();
    if (s.cols() != n) {
        throw DimensionError("jacobi_eigendecomposition needs a square matrix");
    }
    if (n > 0 && (s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw DimensionError("jacobi_eigendecomposition needs a symmetric matrix");
    }
    Eigen::MatrixXd a = 0.5 * (s + s.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    JacobiResult out;

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_norm2(a) == 0.0) {
            break;
        }
        ++out.sweeps;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Entries below the rounding level of both diagonals are dropped.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) {
                    t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = a(order[k], order[k]);
        out.eigenvectors.col(k) = v.col(order[k]);
    }
    return out;
}

double offdiag_loss(const Eigen::MatrixXcd &u, const LaplacianMatrix &lap) {
    const Eigen::MatrixXcd lam = conjugate(u, lap);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < lam.rows(); ++i) {
        for (Eigen::Index j = 0; j < lam.cols(); ++j) {
            if (i != j) {
                loss += std::norm(lam(i, j));
            }
        }
    }
    return loss;
}

LossAndGradient eigenspace_loss_gradient(const QsfCircuit &circuit,
                                         const LaplacianMatrix &lap) {
    check_matrix_mode(lap, circuit.n_qubits);
    const Eigen::MatrixXcd u = circuit_unitary(circuit);
    LossAndGradient out;
    out.loss = offdiag_loss(u, lap);
    // loss = ||L||^2 - sum_i d_i^2 with d_i = u_i^dagger L u_i, so the co-state
    // of column i is -2 d_i L u_i.
    Eigen::MatrixXcd lu = lap.entries.cast<Complex>() * u;
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
        const double d = u.col(i).dot(lu.col(i)).real();
        out.conjugated_trace += d;
        lu.col(i) *= -2.0 * d;
    }
    out.gradient.assign(circuit.parameter_count(), 0.0);
    adjoint_accumulate(circuit, u, std::move(lu), out.gradient);
    return out;
}

LossAndGradient eigenspace_loss_gradient_fd(const QsfCircuit &circuit,
                                            const LaplacianMatrix &lap, double step) {
    check_matrix_mode(lap, circuit.n_qubits);
    LossAndGradient out;
    const Eigen::MatrixXcd u = circuit_unitary(circuit);
    out.loss = offdiag_loss(u, lap);
    out.conjugated_trace = conjugate(u, lap).diagonal().real().sum();
    out.gradient.resize(circuit.parameter_count());
    QsfCircuit probe = circuit;
    for (std::size_t p = 0; p < probe.params.size(); ++p) {
        const double saved = probe.params[p];
        probe.params[p] = saved + step;
        const double up = offdiag_loss(circuit_unitary(probe), lap);
        probe.params[p] = saved - step;
        const double down = offdiag_loss(circuit_unitary(probe), lap);
        probe.params[p] = saved;
        out.gradient[p] = (up - down) / (2.0 * step);
    }
    return out;
}

EigenApproxResult optimize_eigenspace(const LaplacianMatrix &lap,
                                      const ConnectionMatrix &connection,
                                      const EigenApproxConfig &config) {
    if (config.iterations < 1 || !(config.learning_rate > 0.0) || config.n_layers < 1) {
        throw ConfigError("eigenspace optimization needs iterations >= 1, layers >= 1 and "
                          "a positive learning rate");
    }
    check_matrix_mode(lap, connection.n_qubits());

    Rng rng(config.seed);
    const PhaseMatrix phase = init_phase_matrix(connection, config.alpha_init, rng);
    EigenApproxResult result;
    result.circuit = build_circuit(connection, phase, config.n_layers, rng);
    QsfCircuit &circ = result.circuit;

    AdamState adam;
    result.trace.losses.reserve(config.iterations);
    result.conjugated_traces.reserve(config.iterations);
    for (int it = 0; it < config.iterations; ++it) {
        const LossAndGradient lg = config.finite_difference_gradients
                                       ? eigenspace_loss_gradient_fd(circ, lap)
                                       : eigenspace_loss_gradient(circ, lap);
        result.trace.losses.push_back(lg.loss);
        result.conjugated_traces.push_back(lg.conjugated_trace);
        if (circ.params.empty()) {
            continue;
        }
        adamw_step(circ.params, lg.gradient, adam, config.learning_rate, 0.0, {},
                   "circuit");
    }
    return result;
}

Eigen::VectorXd recovered_eigenvalues(const QsfCircuit &circuit, const LaplacianMatrix &lap) {
    const Eigen::MatrixXcd lam = conjugate(circuit_unitary(circuit), lap);
    Eigen::VectorXd diag = lam.diagonal().real();
    std::sort(diag.data(), diag.data() + diag.size());
    return diag;
}

} // namespace qsf
