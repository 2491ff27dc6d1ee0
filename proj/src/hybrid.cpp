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
#include "qsf/hybrid.hpp"

#include <cmath>
#include <string>

#include "qsf/error.hpp"
#include "qsf/gradients.hpp"

namespace qsf {

namespace {

std::vector<int> batch_labels(std::span<const PreparedSample> samples,
                              std::span<const std::size_t> indices) {
    std::vector<int> labels;
    labels.reserve(indices.size());
    for (std::size_t i : indices) {
        labels.push_back(samples[i].label);
    }
    return labels;
}

int count_correct(const Eigen::MatrixXd &logits, std::span<const int> labels,
                  std::vector<int> *predictions = nullptr) {
    int correct = 0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        Eigen::Index arg = 0;
        logits.row(r).maxCoeff(&arg);
        correct += static_cast<int>(arg) == labels[static_cast<std::size_t>(r)] ? 1 : 0;
        if (predictions) {
            predictions->push_back(static_cast<int>(arg));
        }
    }
    return correct;
}

} // namespace

HybridModel::HybridModel(const HybridConfig &config, const PhaseMatrix &phase_draw, Rng &rng)
    : config_(config) {
    if (config.n_qubits < 1 || config.n_layers < 1) {
        throw ConfigError("hybrid model needs at least one qubit and one layer");
    }
    config_.head.n_inputs = config.n_qubits;
    quantum = init_shared_parameters(config.n_qubits, config.n_layers, phase_draw, rng);
    head = HeadModel(config_.head, rng);
}

std::size_t hybrid_parameter_count(const HybridConfig &config) {
    HeadConfig head = config.head;
    head.n_inputs = config.n_qubits;
    return parameter_count(config.n_qubits, config.n_layers) + HeadModel::parameter_count(head);
}

QsfCircuit HybridModel::sample_circuit(const PreparedSample &sample) const {
    return bind_shared_circuit(sample.connection, config_.n_layers, quantum, config_.alpha_init);
}

Eigen::MatrixXd HybridModel::features(std::span<const PreparedSample> samples,
                                      std::span<const std::size_t> indices) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(indices.size()), config_.n_qubits);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const PreparedSample &s = samples[indices[r]];
        const MarginalVector m =
            qubit_marginals(apply_circuit(sample_circuit(s), s.encoded_state));
        for (int q = 0; q < config_.n_qubits; ++q) {
            x(static_cast<Eigen::Index>(r), q) = m.probabilities[static_cast<std::size_t>(q)];
        }
    }
    return x;
}

BatchStats train_batch(HybridModel &model, std::span<const PreparedSample> samples,
                       std::span<const std::size_t> indices, HybridOptimizer &optimizer,
                       double lr, double weight_decay, Rng &rng) {
    const int n_q = model.config().n_qubits;
    const auto b = static_cast<Eigen::Index>(indices.size());

    std::vector<QsfCircuit> circuits;
    std::vector<StateVector> outputs;
    circuits.reserve(indices.size());
    outputs.reserve(indices.size());
    Eigen::MatrixXd x(b, n_q);
    for (Eigen::Index r = 0; r < b; ++r) {
        const PreparedSample &s = samples[indices[static_cast<std::size_t>(r)]];
        circuits.push_back(model.sample_circuit(s));
        outputs.push_back(apply_circuit(circuits.back(), s.encoded_state));
        const MarginalVector m = qubit_marginals(outputs.back());
        for (int q = 0; q < n_q; ++q) {
            x(r, q) = m.probabilities[static_cast<std::size_t>(q)];
        }
    }

    const std::vector<int> labels = batch_labels(samples, indices);
    HeadBackward hb = head_backward(model.head, x, labels, Mode::Train, rng);
    if (!std::isfinite(hb.loss)) {
        throw NumericError("non-finite training loss");
    }

    std::vector<double> qgrad(model.quantum.size(), 0.0);
    std::vector<double> upstream(static_cast<std::size_t>(n_q));
    for (Eigen::Index r = 0; r < b; ++r) {
        for (int q = 0; q < n_q; ++q) {
            upstream[static_cast<std::size_t>(q)] = hb.input_grad(r, q);
        }
        const std::vector<double> g =
            marginal_gradients(circuits[static_cast<std::size_t>(r)],
                               outputs[static_cast<std::size_t>(r)], upstream);
        for (std::size_t p = 0; p < g.size(); ++p) {
            qgrad[p] += g[p];
        }
    }

    adamw_step(model.quantum, qgrad, optimizer.quantum, lr, weight_decay, optimizer.adam,
               "quantum");
    auto blocks = model.head.params.blocks();
    auto grad_blocks = hb.grads.blocks();
    optimizer.head.resize(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        adamw_step(blocks[k].values, grad_blocks[k].values, optimizer.head[k], lr, weight_decay,
                   optimizer.adam, blocks[k].name);
    }

    BatchStats stats;
    stats.loss = hb.loss;
    stats.count = static_cast<int>(b);
    stats.correct = count_correct(hb.logits, labels);
    return stats;
}

Evaluation evaluate(const HybridModel &model, std::span<const PreparedSample> samples,
                    std::span<const std::size_t> indices) {
    Evaluation ev;
    if (indices.empty()) {
        return ev;
    }
    const Eigen::MatrixXd x = model.features(samples, indices);
    // Eval mode reads running statistics only; a copy keeps the call const.
    HeadModel head = model.head;
    Rng unused(0);
    const Eigen::MatrixXd logits = head.forward(x, Mode::Eval, unused);
    const std::vector<int> labels = batch_labels(samples, indices);
    ev.loss = cross_entropy(logits, labels);
    ev.accuracy = static_cast<double>(count_correct(logits, labels, &ev.predictions)) /
                  static_cast<double>(indices.size());
    return ev;
}

} // namespace qsf
