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
#include "qsf/statevector.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsf/error.hpp"
#include "qsf/graph.hpp"

namespace qsf {

namespace {

// Index of the k-th basis state whose bit `pos` is zero.
inline std::size_t insert_zero(std::size_t k, std::size_t low_mask) {
    return ((k & ~low_mask) << 1) | (k & low_mask);
}

struct Rot {
    double c;
    double s;
};

inline void rotate_pair(Complex &a0, Complex &a1, Rot r) {
    const Complex x0 = a0;
    const Complex x1 = a1;
    a0 = r.c * x0 - r.s * x1;
    a1 = r.s * x0 + r.c * x1;
}

} // namespace

void apply_gate(std::span<Complex> amps, int n_qubits, GateKind kind, int target, int control,
                double angle, bool adjoint) {
    const std::size_t tmask = qubit_mask(n_qubits, target);
    const std::size_t half = amps.size() / 2;
    const std::size_t low = tmask - 1;
    const std::size_t cmask = is_controlled(kind) ? qubit_mask(n_qubits, control) : 0;
    if (adjoint) {
        angle = -angle;
    }

    switch (kind) {
    case GateKind::Hadamard: {
        constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t i0 = insert_zero(k, low);
            const std::size_t i1 = i0 | tmask;
            const Complex x0 = amps[i0];
            const Complex x1 = amps[i1];
            amps[i0] = inv_sqrt2 * (x0 + x1);
            amps[i1] = inv_sqrt2 * (x0 - x1);
        }
        break;
    }
    case GateKind::RY:
    case GateKind::CRY: {
        const Rot r{std::cos(angle / 2), std::sin(angle / 2)};
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t i0 = insert_zero(k, low);
            if ((i0 & cmask) != cmask) {
                continue;
            }
            rotate_pair(amps[i0], amps[i0 | tmask], r);
        }
        break;
    }
    case GateKind::CPhase: {
        const Complex phase = std::polar(1.0, angle);
        const std::size_t both = tmask | cmask;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if ((i & both) == both) {
                amps[i] *= phase;
            }
        }
        break;
    }
    }
}

Complex derivative_overlap(std::span<const Complex> bra, std::span<const Complex> ket,
                           int n_qubits, GateKind kind, int target, int control,
                           double angle) {
    const std::size_t tmask = qubit_mask(n_qubits, target);
    const std::size_t cmask = is_controlled(kind) ? qubit_mask(n_qubits, control) : 0;
    Complex acc{0.0, 0.0};
    switch (kind) {
    case GateKind::Hadamard:
        break;
    case GateKind::RY:
    case GateKind::CRY: {
        // d/dtheta [[c, -s], [s, c]] = 0.5 * [[-s, -c], [c, -s]]
        const double c = 0.5 * std::cos(angle / 2);
        const double s = 0.5 * std::sin(angle / 2);
        const std::size_t half = ket.size() / 2;
        const std::size_t low = tmask - 1;
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t i0 = insert_zero(k, low);
            if ((i0 & cmask) != cmask) {
                continue;
            }
            const std::size_t i1 = i0 | tmask;
            const Complex d0 = -s * ket[i0] - c * ket[i1];
            const Complex d1 = c * ket[i0] - s * ket[i1];
            acc += std::conj(bra[i0]) * d0 + std::conj(bra[i1]) * d1;
        }
        break;
    }
    case GateKind::CPhase: {
        const Complex dphase = Complex{0.0, 1.0} * std::polar(1.0, angle);
        const std::size_t both = tmask | cmask;
        for (std::size_t i = 0; i < ket.size(); ++i) {
            if ((i & both) == both) {
                acc += std::conj(bra[i]) * dphase * ket[i];
            }
        }
        break;
    }
    }
    return acc;
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 20) {
        throw CapacityError("state vectors support 1 to 20 qubits, got " +
                            std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    if (n_qubits < 1 || n_qubits > 20) {
        throw CapacityError("state vectors support 1 to 20 qubits, got " +
                            std::to_string(n_qubits));
    }
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw DimensionError("amplitude count does not match 2^" + std::to_string(n_qubits));
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amps_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

StateVector amplitude_encode(std::span<const double> features) {
    if (!is_pow2(features.size()) || features.size() < 2) {
        throw DimensionError("amplitude encoding needs a power-of-two length >= 2, got " +
                             std::to_string(features.size()));
    }
    const int n_qubits = ceil_log2(features.size());
    double norm2 = 0.0;
    for (double f : features) {
        norm2 += f * f;
    }
    const double norm = std::sqrt(norm2);
    if (norm < 1e-12) {
        return StateVector(n_qubits);
    }
    std::vector<Complex> amps(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        amps[i] = features[i] / norm;
    }
    return StateVector(n_qubits, std::move(amps));
}

MarginalVector qubit_marginals(const StateVector &state) {
    const int n = state.n_qubits();
    MarginalVector out;
    out.probabilities.assign(n, 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p == 0.0) {
            continue;
        }
        for (int q = 0; q < n; ++q) {
            if (i & qubit_mask(n, q)) {
                out.probabilities[q] += p;
            }
        }
    }
    return out;
}

} // namespace qsf
