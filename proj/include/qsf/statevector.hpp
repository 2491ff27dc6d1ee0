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
 * Dense statevector, amplitude encoding and per-qubit measurement.
 */
#pragma once

#include <span>
#include <vector>

#include "qsf/gates.hpp"

namespace qsf {

class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits);
    StateVector(int n_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<Complex> amplitudes() { return amps_; }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] double norm() const;

  private:
    int n_qubits_;
    std::vector<Complex> amps_;
};

/// P(qubit q reads 1) for every qubit.
struct MarginalVector {
    std::vector<double> probabilities;
};

/**
 * Normalizes a real vector of length 2^n into a state. A vector with norm
 * below 1e-12 encodes as |0...0>. Throws DimensionError for other lengths.
 */
[[nodiscard]] StateVector amplitude_encode(std::span<const double> features);

[[nodiscard]] MarginalVector qubit_marginals(const StateVector &state);

} // namespace qsf
