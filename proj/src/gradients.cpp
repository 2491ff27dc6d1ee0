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
#include "qsf/gradients.hpp"

#include <string>

#include "qsf/error.hpp"

namespace qsf {

void adjoint_accumulate(const QsfCircuit &circuit, Eigen::MatrixXcd outputs,
                        Eigen::MatrixXcd costates, std::span<double> grad) {
    const int n = circuit.n_qubits;
    const auto dim = static_cast<std::size_t>(Eigen::Index{1} << n);
    if (outputs.rows() != static_cast<Eigen::Index>(dim) || costates.rows() != outputs.rows() ||
        costates.cols() != outputs.cols()) {
        throw DimensionError("adjoint_accumulate: state/co-state shape mismatch");
    }
    if (grad.size() != circuit.parameter_count()) {
        throw DimensionError("adjoint_accumulate: gradient buffer has wrong size");
    }
    const Eigen::Index cols = outputs.cols();
    for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
        const Gate &g = *it;
        const double angle = circuit.angle(g);
        double dangle = 0.0;
        for (Eigen::Index col = 0; col < cols; ++col) {
            std::span<Complex> psi{outputs.col(col).data(), dim};
            std::span<Complex> lam{costates.col(col).data(), dim};
            apply_gate(psi, n, g.kind, g.target, g.control, angle, true);
            if (g.param >= 0) {
                dangle += 2.0 *
                          derivative_overlap(lam, psi, n, g.kind, g.target, g.control, angle)
                              .real();
            }
            apply_gate(lam, n, g.kind, g.target, g.control, angle, true);
        }
        if (g.param >= 0) {
            grad[g.param] += g.scale * dangle;
        }
    }
}

std::vector<double> marginal_gradients(const QsfCircuit &circuit, const StateVector &output,
                                       std::span<const double> upstream) {
    const int n = circuit.n_qubits;
    if (static_cast<int>(upstream.size()) != n || output.n_qubits() != n) {
        throw DimensionError("upstream gradient has " + std::to_string(upstream.size()) +
                             " entries for " + std::to_string(n) + " qubits");
    }
    std::vector<double> grad(circuit.parameter_count(), 0.0);
    bool any = false;
    for (double u : upstream) {
        any = any || u != 0.0;
    }
    if (!any) {
        return grad;
    }
    const auto dim = static_cast<Eigen::Index>(output.dim());
    Eigen::MatrixXcd psi(dim, 1);
    Eigen::MatrixXcd lam(dim, 1);
    // dP_q = 2 Re <Pi_q psi | d psi>, so lambda = sum_q upstream[q] Pi_q psi.
    for (Eigen::Index i = 0; i < dim; ++i) {
        double weight = 0.0;
        for (int q = 0; q < n; ++q) {
            if (static_cast<std::size_t>(i) & qubit_mask(n, q)) {
                weight += upstream[q];
            }
        }
        psi(i, 0) = output[static_cast<std::size_t>(i)];
        lam(i, 0) = weight * psi(i, 0);
    }
    adjoint_accumulate(circuit, std::move(psi), std::move(lam), grad);
    return grad;
}

std::vector<double> circuit_gradients(const QsfCircuit &circuit, const StateVector &input,
                                      std::span<const double> upstream) {
    return marginal_gradients(circuit, apply_circuit(circuit, input), upstream);
}

} // namespace qsf
