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
#include "qsf/head.hpp"

#include <cmath>
#include <string>

#include "qsf/error.hpp"

namespace qsf {

namespace {

std::span<double> span_of(Eigen::MatrixXd &m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<double> span_of(Eigen::VectorXd &v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

void init_linear(Eigen::MatrixXd &w, Rng &rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            w(r, c) = rng.uniform(-bound, bound);
        }
    }
}

struct NormOut {
    Eigen::MatrixXd xhat;
    Eigen::VectorXd inv_std;
};

NormOut batch_norm(const Eigen::MatrixXd &z, Mode mode, Eigen::VectorXd &running_mean,
                   Eigen::VectorXd &running_var, double eps, double momentum) {
    const auto b = static_cast<double>(z.rows());
    NormOut out;
    if (mode == Mode::Train) {
        const Eigen::RowVectorXd mean = z.colwise().mean();
        const Eigen::MatrixXd centered = z.rowwise() - mean;
        const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / b;
        out.inv_std = (var.array() + eps).rsqrt().transpose();
        out.xhat = centered * out.inv_std.asDiagonal();
        running_mean = (1.0 - momentum) * running_mean + momentum * mean.transpose();
        running_var =
            (1.0 - momentum) * running_var + momentum * (var.transpose() * (b / (b - 1.0)));
    } else {
        out.inv_std = (running_var.array() + eps).rsqrt();
        out.xhat = (z.rowwise() - running_mean.transpose()) * out.inv_std.asDiagonal();
    }
    return out;
}

// Backward through y = gamma * xhat + beta given dL/dy.
Eigen::MatrixXd batch_norm_backward(const Eigen::MatrixXd &dy, const Eigen::MatrixXd &xhat,
                                    const Eigen::VectorXd &inv_std,
                                    const Eigen::VectorXd &gamma, Mode mode,
                                    Eigen::VectorXd &dgamma, Eigen::VectorXd &dbeta) {
    dgamma = (dy.array() * xhat.array()).colwise().sum().transpose();
    dbeta = dy.colwise().sum().transpose();
    const Eigen::MatrixXd dxhat = dy * gamma.asDiagonal();
    if (mode == Mode::Eval) {
        return dxhat * inv_std.asDiagonal();
    }
    const auto b = static_cast<double>(dy.rows());
    const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
    const Eigen::RowVectorXd sum_dxhat_xhat = (dxhat.array() * xhat.array()).colwise().sum();
    Eigen::MatrixXd dz = (b * dxhat).rowwise() - sum_dxhat;
    dz -= xhat * sum_dxhat_xhat.asDiagonal();
    return dz * (inv_std / b).asDiagonal();
}

} // namespace

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng &rng) {
    Eigen::MatrixXd keep(rows, cols);
    const double scale = p < 1.0 ? 1.0 / (1.0 - p) : 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            keep(r, c) = rng.bernoulli(p) ? 0.0 : scale;
        }
    }
    return keep;
}

Eigen::MatrixXd linear_forward(const Eigen::MatrixXd &x, const Eigen::MatrixXd &w,
                               const Eigen::VectorXd &b) {
    if (x.cols() != w.cols() || w.rows() != b.size()) {
        throw DimensionError("linear layer shape mismatch");
    }
    return (x * w.transpose()).rowwise() + b.transpose();
}

HeadParams HeadParams::zeros(const HeadConfig &cfg) {
    HeadParams p;
    p.w1 = Eigen::MatrixXd::Zero(cfg.h1, cfg.n_inputs);
    p.b1 = Eigen::VectorXd::Zero(cfg.h1);
    p.gamma1 = Eigen::VectorXd::Zero(cfg.h1);
    p.beta1 = Eigen::VectorXd::Zero(cfg.h1);
    p.w2 = Eigen::MatrixXd::Zero(cfg.h2, cfg.h1);
    p.b2 = Eigen::VectorXd::Zero(cfg.h2);
    p.gamma2 = Eigen::VectorXd::Zero(cfg.h2);
    p.beta2 = Eigen::VectorXd::Zero(cfg.h2);
    p.w3 = Eigen::MatrixXd::Zero(cfg.n_classes, cfg.h2);
    p.b3 = Eigen::VectorXd::Zero(cfg.n_classes);
    return p;
}

std::vector<ParamBlock> HeadParams::blocks() {
    return {{"fc1.weight", span_of(w1)}, {"fc1.bias", span_of(b1)},
            {"bn1.weight", span_of(gamma1)}, {"bn1.bias", span_of(beta1)},
            {"fc2.weight", span_of(w2)}, {"fc2.bias", span_of(b2)},
            {"bn2.weight", span_of(gamma2)}, {"bn2.bias", span_of(beta2)},
            {"fc3.weight", span_of(w3)}, {"fc3.bias", span_of(b3)}};
}

std::size_t HeadParams::size() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + gamma1.size() + beta1.size() +
                                    w2.size() + b2.size() + gamma2.size() + beta2.size() +
                                    w3.size() + b3.size());
}

HeadModel::HeadModel(const HeadConfig &config, Rng &rng) : config_(config) {
    if (config.n_inputs < 1 || config.h1 < 1 || config.h2 < 1 || config.n_classes < 1) {
        throw ConfigError("head dimensions must be positive");
    }
    if (config.dropout < 0.0 || config.dropout >= 1.0) {
        throw ConfigError("dropout probability must lie in [0, 1)");
    }
    params = HeadParams::zeros(config);
    init_linear(params.w1, rng);
    init_linear(params.w2, rng);
    init_linear(params.w3, rng);
    params.gamma1.setOnes();
    params.gamma2.setOnes();
    running_mean1 = Eigen::VectorXd::Zero(config.h1);
    running_var1 = Eigen::VectorXd::Ones(config.h1);
    running_mean2 = Eigen::VectorXd::Zero(config.h2);
    running_var2 = Eigen::VectorXd::Ones(config.h2);
}

std::size_t HeadModel::parameter_count(const HeadConfig &c) {
    const auto n = static_cast<std::size_t>(c.n_inputs);
    const auto h1 = static_cast<std::size_t>(c.h1);
    const auto h2 = static_cast<std::size_t>(c.h2);
    const auto k = static_cast<std::size_t>(c.n_classes);
    return (n * h1 + h1) + 2 * h1 + (h1 * h2 + h2) + 2 * h2 + (h2 * k + k);
}

Eigen::MatrixXd HeadModel::forward(const Eigen::MatrixXd &batch, Mode mode, Rng &rng,
                                   HeadCache *cache) {
    if (batch.rows() == 0) {
        throw DimensionError("empty batch");
    }
    if (batch.cols() != config_.n_inputs) {
        throw DimensionError("batch width " + std::to_string(batch.cols()) +
                             " does not match head input " + std::to_string(config_.n_inputs));
    }
    if (mode == Mode::Train && batch.rows() < 2) {
        throw DimensionError("train-mode batch normalization needs at least two samples");
    }
    HeadCache local;
    HeadCache &c = cache ? *cache : local;
    c.mode = mode;
    c.input = batch;

    const Eigen::MatrixXd z1 = linear_forward(batch, params.w1, params.b1);
    NormOut n1 = batch_norm(z1, mode, running_mean1, running_var1, config_.bn_eps,
                            config_.bn_momentum);
    c.pre_relu1 = (n1.xhat * params.gamma1.asDiagonal()).rowwise() + params.beta1.transpose();
    c.keep1 = mode == Mode::Train
                  ? dropout_mask(batch.rows(), config_.h1, config_.dropout, rng)
                  : Eigen::MatrixXd::Ones(batch.rows(), config_.h1);
    c.out1 = c.pre_relu1.cwiseMax(0.0).cwiseProduct(c.keep1);
    c.xhat1 = std::move(n1.xhat);
    c.inv_std1 = std::move(n1.inv_std);

    const Eigen::MatrixXd z2 = linear_forward(c.out1, params.w2, params.b2);
    NormOut n2 = batch_norm(z2, mode, running_mean2, running_var2, config_.bn_eps,
                            config_.bn_momentum);
    c.pre_relu2 = (n2.xhat * params.gamma2.asDiagonal()).rowwise() + params.beta2.transpose();
    c.keep2 = mode == Mode::Train
                  ? dropout_mask(batch.rows(), config_.h2, config_.dropout, rng)
                  : Eigen::MatrixXd::Ones(batch.rows(), config_.h2);
    c.out2 = c.pre_relu2.cwiseMax(0.0).cwiseProduct(c.keep2);
    c.xhat2 = std::move(n2.xhat);
    c.inv_std2 = std::move(n2.inv_std);

    return linear_forward(c.out2, params.w3, params.b3);
}

Eigen::MatrixXd HeadModel::backward(const HeadCache &c, const Eigen::MatrixXd &dlogits,
                                    HeadParams &g) const {
    g = HeadParams::zeros(config_);
    g.w3 = dlogits.transpose() * c.out2;
    g.b3 = dlogits.colwise().sum().transpose();
    Eigen::MatrixXd d = dlogits * params.w3;

    d = d.cwiseProduct(c.keep2).cwiseProduct((c.pre_relu2.array() > 0.0).cast<double>().matrix());
    d = batch_norm_backward(d, c.xhat2, c.inv_std2, params.gamma2, c.mode, g.gamma2, g.beta2);
    g.w2 = d.transpose() * c.out1;
    g.b2 = d.colwise().sum().transpose();
    d = d * params.w2;

    d = d.cwiseProduct(c.keep1).cwiseProduct((c.pre_relu1.array() > 0.0).cast<double>().matrix());
    d = batch_norm_backward(d, c.xhat1, c.inv_std1, params.gamma1, c.mode, g.gamma1, g.beta1);
    g.w1 = d.transpose() * c.input;
    g.b1 = d.colwise().sum().transpose();
    return d * params.w1;
}

double cross_entropy(const Eigen::MatrixXd &logits, std::span<const int> labels) {
    if (static_cast<std::size_t>(logits.rows()) != labels.size() || logits.rows() == 0) {
        throw DimensionError("cross_entropy: logits rows and labels differ");
    }
    double total = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const int y = labels[static_cast<std::size_t>(r)];
        if (y < 0 || y >= logits.cols()) {
            throw DimensionError("label " + std::to_string(y) + " outside [0, " +
                                 std::to_string(logits.cols()) + ")");
        }
        const double mx = logits.row(r).maxCoeff();
        const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
        total += lse - logits(r, y);
    }
    return total / static_cast<double>(logits.rows());
}

Eigen::MatrixXd cross_entropy_grad(const Eigen::MatrixXd &logits,
                                   std::span<const int> labels) {
    if (static_cast<std::size_t>(logits.rows()) != labels.size() || logits.rows() == 0) {
        throw DimensionError("cross_entropy_grad: logits rows and labels differ");
    }
    Eigen::MatrixXd g(logits.rows(), logits.cols());
    const double inv_b = 1.0 / static_cast<double>(logits.rows());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const int y = labels[static_cast<std::size_t>(r)];
        if (y < 0 || y >= logits.cols()) {
            throw DimensionError("label " + std::to_string(y) + " outside [0, " +
                                 std::to_string(logits.cols()) + ")");
        }
        const double mx = logits.row(r).maxCoeff();
        Eigen::RowVectorXd e = (logits.row(r).array() - mx).exp();
        e /= e.sum();
        e(y) -= 1.0;
        g.row(r) = e * inv_b;
    }
    return g;
}

HeadBackward head_backward(HeadModel &model, const Eigen::MatrixXd &batch,
                           std::span<const int> labels, Mode mode, Rng &rng) {
    HeadCache cache;
    HeadBackward out;
    out.logits = model.forward(batch, mode, rng, &cache);
    out.loss = cross_entropy(out.logits, labels);
    out.input_grad = model.backward(cache, cross_entropy_grad(out.logits, labels), out.grads);
    return out;
}

} // namespace qsf
