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
 * Gate kernels acting in place on a dense amplitude vector.
 *
 * Qubit q maps to bit (n_qubits - 1 - q) of the basis index, so qubit 0 is
 * the most significant bit.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace qsf {

using Complex = std::complex<double>;

enum class GateKind : std::uint8_t {
    Hadamard,
    RY,     ///< exp(-i theta Y / 2)
    CRY,    ///< RY on target when control is |1>
    CPhase, ///< diag(1, 1, 1, e^{i phi}) on (control, target)
};

[[nodiscard]] constexpr bool is_controlled(GateKind kind) {
    return kind == GateKind::CRY || kind == GateKind::CPhase;
}

[[nodiscard]] constexpr std::size_t qubit_mask(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

/// Applies the gate (or its adjoint) to `amps`. `control` is ignored for
/// uncontrolled kinds.
void apply_gate(std::span<Complex> amps, int n_qubits, GateKind kind, int target, int control,
                double angle, bool adjoint = false);

/// <bra| dG/dangle |ket> for a parametric gate.
[[nodiscard]] Complex derivative_overlap(std::span<const Complex> bra,
                                         std::span<const Complex> ket, int n_qubits,
                                         GateKind kind, int target, int control, double angle);

} // namespace qsf
