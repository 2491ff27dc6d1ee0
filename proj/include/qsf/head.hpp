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
 * Classical prediction head: three linear layers with batch normalization,
 * ReLU and dropout between them, trained by explicit backpropagation.
 *
 *   Linear(n_in, h1) -> BatchNorm(h1) -> ReLU -> Dropout(p)
 *   Linear(h1, h2)   -> BatchNorm(h2) -> ReLU -> Dropout(p)
 *   Linear(h2, n_classes)
 *
 * Batches are row-major: one sample per row.
 */
#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsf/random.hpp"

namespace qsf {

struct HeadConfig {
    int n_inputs = 0;
    int h1 = 32;
    int h2 = 16;
    int n_classes = 2;
    double dropout = 0.25;
    double bn_eps = 1e-5;
    double bn_momentum = 0.1;
};

enum class Mode { Train, Eval };

/// Named view of one parameter block, for optimizers and serialization.
struct ParamBlock {
    std::string name;
    std::span<double> values;
};

/// Learnable head tensors; also used as the gradient container.
struct HeadParams {
    Eigen::MatrixXd w1; ///< h1 x n_in
    Eigen::VectorXd b1;
    Eigen::VectorXd gamma1;
    Eigen::VectorXd beta1;
    Eigen::MatrixXd w2; ///< h2 x h1
    Eigen::VectorXd b2;
    Eigen::VectorXd gamma2;
    Eigen::VectorXd beta2;
    Eigen::MatrixXd w3; ///< n_classes x h2
    Eigen::VectorXd b3;

    /// Zero tensors shaped for `config`.
    static HeadParams zeros(const HeadConfig &config);

    std::vector<ParamBlock> blocks();
    [[nodiscard]] std::size_t size() const;
};

/// Activations kept from a forward pass for the backward pass.
struct HeadCache {
    Mode mode = Mode::Train;
    Eigen::MatrixXd input;
    Eigen::MatrixXd xhat1, xhat2;
    Eigen::VectorXd inv_std1, inv_std2;
    Eigen::MatrixXd pre_relu1, pre_relu2;
    Eigen::MatrixXd keep1, keep2; ///< dropout multipliers (0 or 1/(1-p))
    Eigen::MatrixXd out1, out2;   ///< inputs to fc2 / fc3
};

class HeadModel {
  public:
    HeadModel() = default;
    /// Linear weights uniform in +-1/sqrt(fan_in), biases zero, gamma 1, beta 0.
    HeadModel(const HeadConfig &config, Rng &rng);

    [[nodiscard]] const HeadConfig &config() const { return config_; }
    [[nodiscard]] static std::size_t parameter_count(const HeadConfig &config);
    [[nodiscard]] std::size_t parameter_count() const { return parameter_count(config_); }

    /**
     * Logits for a batch. Train mode normalizes with batch statistics,
     * updates the running statistics and draws dropout masks from `rng`;
     * eval mode uses running statistics and no dropout.
     * Throws DimensionError for an empty batch, a width mismatch, or a
     * single-row batch in train mode.
     */
    Eigen::MatrixXd forward(const Eigen::MatrixXd &batch, Mode mode, Rng &rng,
                            HeadCache *cache = nullptr);

    /// Backpropagates dLoss/dlogits. Returns dLoss/dinput; fills `grads`.
    Eigen::MatrixXd backward(const HeadCache &cache, const Eigen::MatrixXd &dlogits,
                             HeadParams &grads) const;

    HeadParams params;
    Eigen::VectorXd running_mean1, running_var1;
    Eigen::VectorXd running_mean2, running_var2;

  private:
    HeadConfig config_;
};

/// x W^T + b for a row-major batch.
[[nodiscard]] Eigen::MatrixXd linear_forward(const Eigen::MatrixXd &x, const Eigen::MatrixXd &w,
                                             const Eigen::VectorXd &b);

/// Inverted-dropout multipliers: 0 with probability p, else 1 / (1 - p).
[[nodiscard]] Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p,
                                           Rng &rng);

/// Mean negative log-softmax of the true class. Throws for bad labels.
[[nodiscard]] double cross_entropy(const Eigen::MatrixXd &logits, std::span<const int> labels);

/// d cross_entropy / d logits.
[[nodiscard]] Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd &logits,
                                                 std::span<const int> labels);

struct HeadBackward {
    double loss = 0.0;
    Eigen::MatrixXd logits;
    HeadParams grads;
    Eigen::MatrixXd input_grad;
};

/// Forward, cross-entropy and backward in one call.
[[nodiscard]] HeadBackward head_backward(HeadModel &model, const Eigen::MatrixXd &batch,
                                         std::span<const int> labels, Mode mode, Rng &rng);

} // namespace qsf
