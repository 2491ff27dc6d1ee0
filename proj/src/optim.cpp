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
#include "qsf/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsf/error.hpp"

namespace qsf {

void adamw_step(std::span<double> params, std::span<const double> grads, AdamState &state,
                double lr, double weight_decay, const AdamConfig &config,
                std::string_view name) {
    if (params.size() != grads.size()) {
        throw DimensionError(std::string(name) + ": parameter and gradient sizes differ");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericError("non-finite gradient at " + std::string(name) + "[" +
                               std::to_string(i) + "]");
        }
    }
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(config.beta1, t);
    const double bias2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] *= 1.0 - lr * weight_decay;
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bias1;
        const double vhat = state.v[i] / bias2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + config.eps);
    }
}

bool lr_plateau_update(TrainState &state, double metric, const PlateauConfig &config) {
    if (!std::isfinite(metric)) {
        throw NumericError("plateau scheduler received a non-finite metric");
    }
    auto &p = state.plateau;
    if (metric < p.best * (1.0 - config.threshold)) {
        p.best = metric;
        p.bad_epochs = 0;
        return false;
    }
    ++p.bad_epochs;
    if (p.bad_epochs > config.patience) {
        state.lr = std::max(state.lr * config.factor, config.min_lr);
        p.bad_epochs = 0;
        return true;
    }
    return false;
}

} // namespace qsf
