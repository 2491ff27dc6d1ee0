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
 * Adam-family updates and the reduce-on-plateau learning-rate schedule.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace qsf {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moment buffers for one parameter block.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;
};

/**
 * One decoupled-weight-decay Adam step:
 *   p -= lr * wd * p;  p -= lr * mhat / (sqrt(vhat) + eps)
 * With wd = 0 this is plain Adam. Throws NumericError naming
 * `name[index]` when a gradient is not finite.
 */
void adamw_step(std::span<double> params, std::span<const double> grads, AdamState &state,
                double lr, double weight_decay, const AdamConfig &config = {},
                std::string_view name = "param");

struct PlateauConfig {
    double factor = 0.1;
    int patience = 15;
    double threshold = 1e-4; ///< relative improvement required
    double min_lr = 0.0;
};

struct PlateauState {
    double best = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
};

/// Optimizer bookkeeping carried across epochs.
struct TrainState {
    double lr = 0.01;
    PlateauState plateau;
};

/**
 * Feeds one validation-loss reading to the scheduler. The rate is multiplied
 * by `factor` once more than `patience` epochs pass without the metric
 * dropping below best * (1 - threshold). Returns true when it reduced.
 */
bool lr_plateau_update(TrainState &state, double metric, const PlateauConfig &config = {});

} // namespace qsf
