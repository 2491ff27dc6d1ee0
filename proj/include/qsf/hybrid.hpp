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
 * Hybrid graph classifier: the shared filter circuit turns each encoded
 * graph into n_q qubit marginals, the head maps those to class logits.
 * Gradients flow from the cross-entropy loss through the head into the
 * circuit parameters.
 */
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsf/circuit.hpp"
#include "qsf/dataset.hpp"
#include "qsf/head.hpp"
#include "qsf/optim.hpp"

namespace qsf {

struct HybridConfig {
    int n_qubits = 0;
    int n_layers = 4;
    double alpha_init = 0.1;
    HeadConfig head; ///< head.n_inputs is forced to n_qubits
};

class HybridModel {
  public:
    HybridModel() = default;
    /// Circuit RY/CRY angles start in [-0.1, 0.1]; phase parameters start at
    /// `phase_draw`. Head weights follow HeadModel's scheme.
    HybridModel(const HybridConfig &config, const PhaseMatrix &phase_draw, Rng &rng);

    [[nodiscard]] const HybridConfig &config() const { return config_; }
    [[nodiscard]] std::size_t quantum_parameter_count() const { return quantum.size(); }
    [[nodiscard]] std::size_t parameter_count() const {
        return quantum.size() + head.parameter_count();
    }

    /// Circuit for one sample, bound to the current shared parameters.
    [[nodiscard]] QsfCircuit sample_circuit(const PreparedSample &sample) const;

    /// Marginal features, one row per index.
    [[nodiscard]] Eigen::MatrixXd features(std::span<const PreparedSample> samples,
                                           std::span<const std::size_t> indices) const;

    std::vector<double> quantum;
    HeadModel head;

  private:
    HybridConfig config_;
};

/// Total trainable parameters for a configuration, without building a model.
[[nodiscard]] std::size_t hybrid_parameter_count(const HybridConfig &config);

/// AdamW buffers for every parameter block of a hybrid model.
struct HybridOptimizer {
    AdamState quantum;
    std::vector<AdamState> head;
    AdamConfig adam;
};

struct BatchStats {
    double loss = 0.0;
    int correct = 0;
    int count = 0;
};

/**
 * One training step on `indices`: forward in train mode, backward through
 * head and circuit, then AdamW on all blocks. Throws NumericError for a
 * non-finite loss.
 */
BatchStats train_batch(HybridModel &model, std::span<const PreparedSample> samples,
                       std::span<const std::size_t> indices, HybridOptimizer &optimizer,
                       double lr, double weight_decay, Rng &rng);

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
    std::vector<int> predictions;
};

/// Eval-mode loss and accuracy; does not touch running statistics.
[[nodiscard]] Evaluation evaluate(const HybridModel &model,
                                  std::span<const PreparedSample> samples,
                                  std::span<const std::size_t> indices);

} // namespace qsf
