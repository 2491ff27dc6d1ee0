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
#include "qsf/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qsf/error.hpp"
#include "qsf/parallel.hpp"

namespace qsf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T> void read_opt(const json &j, const char *key, T &out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

template <typename T> void read_opt(const json &j, const char *key, std::optional<T> &out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

template <typename T> json opt_json(const std::optional<T> &v) {
    return v ? json(*v) : json(nullptr);
}

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

json read_json(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// Shortest text that reads back to the same double.
std::string num(double v) { return fmt::format("{}", v); }

} // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::EigenApprox:
        return "eigen-approx";
    case ExperimentKind::Train:
        return "train";
    case ExperimentKind::Cv:
        return "cv";
    }
    return "cv";
}

ExperimentKind parse_kind(const std::string &text) {
    if (text == "eigen-approx") {
        return ExperimentKind::EigenApprox;
    }
    if (text == "train") {
        return ExperimentKind::Train;
    }
    if (text == "cv") {
        return ExperimentKind::Cv;
    }
    throw ConfigError("unknown experiment kind '" + text + "'");
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const std::string &what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    if (kind == ExperimentKind::EigenApprox) {
        require(!eigen.qubits.empty(), "eigen.qubits is empty");
        require(!eigen.layers.empty(), "eigen.layers is empty");
        require(eigen.graphs >= 1, "eigen.graphs must be >= 1");
        require(eigen.iterations >= 1, "eigen.iterations must be >= 1");
        require(eigen.learning_rate > 0, "eigen.learning_rate must be > 0");
        require(eigen.edge_prob >= 0 && eigen.edge_prob <= 1, "eigen.edge_prob outside [0, 1]");
        require(eigen.alpha_init >= 0 && eigen.alpha_init <= 1, "eigen.alpha_init outside [0, 1]");
        for (int q : eigen.qubits) {
            require(q >= 1 && q <= kMatrixModeMaxQubits,
                    "eigen.qubits entries must lie in [1, " +
                        std::to_string(kMatrixModeMaxQubits) + "]");
        }
        for (int l : eigen.layers) {
            require(l >= 1, "eigen.layers entries must be >= 1");
        }
        return;
    }
    require(training.epochs >= 1, "training.epochs must be >= 1");
    require(training.batch_size >= 2, "training.batch_size must be >= 2");
    require(training.learning_rate > 0, "training.learning_rate must be > 0");
    require(training.weight_decay >= 0, "training.weight_decay must be >= 0");
    require(training.scheduler_factor > 0 && training.scheduler_factor < 1,
            "training.scheduler_factor outside (0, 1)");
    require(training.scheduler_patience >= 0, "training.scheduler_patience must be >= 0");
    require(training.folds >= 2, "training.folds must be >= 2");
    require(training.val_fraction >= 0 && training.val_fraction < 1,
            "training.val_fraction outside [0, 1)");
    require(model.n_layers >= 1, "model.n_layers must be >= 1");
    require(model.h1 >= 1 && model.h2 >= 1, "model hidden sizes must be >= 1");
    require(model.dropout >= 0 && model.dropout < 1, "model.dropout outside [0, 1)");
    require(model.alpha_init >= 0 && model.alpha_init <= 1, "model.alpha_init outside [0, 1]");
    require(model.noise_low > 0 && model.noise_low <= model.noise_high,
            "model noise range must satisfy 0 < low <= high");
    require(!dataset.n_qubits || *dataset.n_qubits >= 1, "dataset.n_qubits must be >= 1");
}

ExperimentConfig config_from_json(const json &j) {
    ExperimentConfig c;
    try {
        if (j.contains("experiment")) {
            c.kind = parse_kind(j.at("experiment").get<std::string>());
        }
        read_opt(j, "seed", c.seed);
        if (j.contains("output_dir")) {
            c.output_dir = j.at("output_dir").get<std::string>();
        }
        if (j.contains("dataset")) {
            const json &d = j.at("dataset");
            read_opt(d, "name", c.dataset.name);
            if (d.contains("path")) {
                c.dataset.path = d.at("path").get<std::string>();
            }
            read_opt(d, "n_qubits", c.dataset.n_qubits);
            read_opt(d, "n_classes", c.dataset.n_classes);
            read_opt(d, "minmax_scale", c.dataset.minmax_scale);
        }
        if (j.contains("eigen")) {
            const json &e = j.at("eigen");
            read_opt(e, "qubits", c.eigen.qubits);
            read_opt(e, "layers", c.eigen.layers);
            read_opt(e, "graphs", c.eigen.graphs);
            read_opt(e, "edge_prob", c.eigen.edge_prob);
            read_opt(e, "iterations", c.eigen.iterations);
            read_opt(e, "learning_rate", c.eigen.learning_rate);
            read_opt(e, "alpha_init", c.eigen.alpha_init);
        }
        if (j.contains("model")) {
            const json &m = j.at("model");
            read_opt(m, "n_layers", c.model.n_layers);
            read_opt(m, "h1", c.model.h1);
            read_opt(m, "h2", c.model.h2);
            read_opt(m, "dropout", c.model.dropout);
            read_opt(m, "alpha_init", c.model.alpha_init);
            read_opt(m, "noise_low", c.model.noise_low);
            read_opt(m, "noise_high", c.model.noise_high);
        }
        if (j.contains("training")) {
            const json &t = j.at("training");
            read_opt(t, "batch_size", c.training.batch_size);
            read_opt(t, "epochs", c.training.epochs);
            read_opt(t, "learning_rate", c.training.learning_rate);
            read_opt(t, "weight_decay", c.training.weight_decay);
            read_opt(t, "scheduler_factor", c.training.scheduler_factor);
            read_opt(t, "scheduler_patience", c.training.scheduler_patience);
            read_opt(t, "scheduler_threshold", c.training.scheduler_threshold);
            read_opt(t, "folds", c.training.folds);
            read_opt(t, "val_fraction", c.training.val_fraction);
        }
        if (j.contains("expected")) {
            const json &x = j.at("expected");
            read_opt(x, "total_parameters", c.expected.total_parameters);
            read_opt(x, "mean_accuracy", c.expected.mean_accuracy);
            read_opt(x, "std_accuracy", c.expected.std_accuracy);
        }
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad configuration: ") + e.what());
    }
    return c;
}

json config_to_json(const ExperimentConfig &c) {
    return {
        {"experiment", to_string(c.kind)},
        {"seed", c.seed},
        {"output_dir", c.output_dir.string()},
        {"dataset",
         {{"name", c.dataset.name},
          {"path", c.dataset.path.string()},
          {"n_qubits", opt_json(c.dataset.n_qubits)},
          {"n_classes", opt_json(c.dataset.n_classes)},
          {"minmax_scale", c.dataset.minmax_scale}}},
        {"eigen",
         {{"qubits", c.eigen.qubits},
          {"layers", c.eigen.layers},
          {"graphs", c.eigen.graphs},
          {"edge_prob", c.eigen.edge_prob},
          {"iterations", c.eigen.iterations},
          {"learning_rate", c.eigen.learning_rate},
          {"alpha_init", c.eigen.alpha_init}}},
        {"model",
         {{"n_layers", c.model.n_layers},
          {"h1", c.model.h1},
          {"h2", c.model.h2},
          {"dropout", c.model.dropout},
          {"alpha_init", c.model.alpha_init},
          {"noise_low", c.model.noise_low},
          {"noise_high", c.model.noise_high}}},
        {"training",
         {{"batch_size", c.training.batch_size},
          {"epochs", c.training.epochs},
          {"learning_rate", c.training.learning_rate},
          {"weight_decay", c.training.weight_decay},
          {"scheduler_factor", c.training.scheduler_factor},
          {"scheduler_patience", c.training.scheduler_patience},
          {"scheduler_threshold", c.training.scheduler_threshold},
          {"folds", c.training.folds},
          {"val_fraction", c.training.val_fraction}}},
        {"expected",
         {{"total_parameters", opt_json(c.expected.total_parameters)},
          {"mean_accuracy", opt_json(c.expected.mean_accuracy)},
          {"std_accuracy", opt_json(c.expected.std_accuracy)}}},
    };
}

ExperimentConfig load_config(const fs::path &path) { return config_from_json(read_json(path)); }

HybridConfig hybrid_config(const ExperimentConfig &config, int n_qubits, int n_classes) {
    if (n_qubits < 1 || n_classes < 1) {
        throw ConfigError("qubit and class counts must be known to size the model");
    }
    HybridConfig h;
    h.n_qubits = n_qubits;
    h.n_layers = config.model.n_layers;
    h.alpha_init = config.model.alpha_init;
    h.head.n_inputs = n_qubits;
    h.head.h1 = config.model.h1;
    h.head.h2 = config.model.h2;
    h.head.n_classes = n_classes;
    h.head.dropout = config.model.dropout;
    return h;
}

std::size_t planned_parameter_count(const ExperimentConfig &config) {
    if (!config.dataset.n_qubits || !config.dataset.n_classes) {
        throw ConfigError("dataset.n_qubits and dataset.n_classes are needed for accounting");
    }
    return hybrid_parameter_count(
        hybrid_config(config, *config.dataset.n_qubits, *config.dataset.n_classes));
}

// ---- eigenspace study ----

Graph eigen_graph(std::uint64_t seed, int n_qubits, int graph_id, double edge_prob) {
    const std::uint64_t s = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(n_qubits)),
                                        static_cast<std::uint64_t>(graph_id));
    return erdos_renyi(1 << n_qubits, edge_prob, s);
}

bool loss_stalled(const std::vector<double> &losses) {
    if (losses.empty()) {
        return false;
    }
    const double final_loss = losses.back();
    if (final_loss <= 1e-3) {
        return false;
    }
    const std::size_t tail = losses.size() - std::max<std::size_t>(1, losses.size() / 10);
    const double earlier = losses[std::min(tail, losses.size() - 1)];
    return earlier - final_loss <= 1e-4 * earlier;
}

EigenExperimentResult run_eigen_experiment(const ExperimentConfig &config, bool write_files) {
    ExperimentConfig cfg = config;
    cfg.kind = ExperimentKind::EigenApprox;
    cfg.validate();
    const EigenSpec &spec = cfg.eigen;

    EigenExperimentResult result;
    for (int q : spec.qubits) {
        for (int l : spec.layers) {
            EigenCell cell;
            cell.n_qubits = q;
            cell.n_layers = l;
            cell.runs.resize(static_cast<std::size_t>(spec.graphs));
            result.cells.push_back(std::move(cell));
        }
    }
    const auto per_cell = static_cast<std::size_t>(spec.graphs);
    parallel_for(result.cells.size() * per_cell, worker_count(), [&](std::size_t job) {
        EigenCell &cell = result.cells[job / per_cell];
        const int g = static_cast<int>(job % per_cell);
        const std::string where = fmt::format("cell (qubits={}, layers={}) graph {}",
                                              cell.n_qubits, cell.n_layers, g);
        try {
            const Graph graph = eigen_graph(cfg.seed, cell.n_qubits, g, spec.edge_prob);
            EigenApproxConfig ec;
            ec.n_layers = cell.n_layers;
            ec.iterations = spec.iterations;
            ec.learning_rate = spec.learning_rate;
            ec.alpha_init = spec.alpha_init;
            ec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(g));
            EigenApproxResult r =
                optimize_eigenspace(normalized_laplacian(graph.adjacency),
                                    qubit_connection_matrix(graph.adjacency, cell.n_qubits), ec);
            EigenRun &run = cell.runs[static_cast<std::size_t>(g)];
            run.graph_id = g;
            run.trace = std::move(r.trace);
            run.stalled = loss_stalled(run.trace.losses);
            run.isolated_node = (graph.adjacency.rowwise().sum().array() == 0.0).any();
            if (run.stalled) {
                spdlog::warn("{}: optimization stalled at loss {:.6g}{}", where,
                             run.trace.losses.back(),
                             run.isolated_node ? " (graph has an isolated node)" : "");
            }
        } catch (const CapacityError &e) {
            throw CapacityError(where + ": " + e.what());
        } catch (const DimensionError &e) {
            throw DimensionError(where + ": " + e.what());
        }
    });

    for (EigenCell &cell : result.cells) {
        const std::size_t n_iter = cell.runs.front().trace.losses.size();
        cell.mean_trace.assign(n_iter, 0.0);
        for (const EigenRun &run : cell.runs) {
            for (std::size_t i = 0; i < n_iter; ++i) {
                cell.mean_trace[i] += run.trace.losses[i];
            }
        }
        for (double &v : cell.mean_trace) {
            v /= static_cast<double>(cell.runs.size());
        }
        spdlog::info("eigen cell qubits={} layers={}: mean loss {:.6g} -> {:.6g}", cell.n_qubits,
                     cell.n_layers, cell.mean_trace.front(), cell.mean_trace.back());
    }

    if (write_files && !cfg.output_dir.empty()) {
        fs::create_directories(cfg.output_dir);
        write_text(cfg.output_dir / "config.json", config_to_json(cfg).dump(2) + "\n");
        std::string summary =
            "n_qubits,n_layers,graphs,mean_initial_loss,mean_final_loss,min_final_loss,"
            "max_final_loss,stalled\n";
        for (const EigenCell &cell : result.cells) {
            std::string trace = "graph_id,iteration,loss\n";
            double lo = cell.runs.front().trace.losses.back();
            double hi = lo;
            int stalled = 0;
            for (const EigenRun &run : cell.runs) {
                for (std::size_t i = 0; i < run.trace.losses.size(); ++i) {
                    trace += fmt::format("{},{},{}\n", run.graph_id, i, num(run.trace.losses[i]));
                }
                lo = std::min(lo, run.trace.losses.back());
                hi = std::max(hi, run.trace.losses.back());
                stalled += run.stalled ? 1 : 0;
            }
            for (std::size_t i = 0; i < cell.mean_trace.size(); ++i) {
                trace += fmt::format("mean,{},{}\n", i, num(cell.mean_trace[i]));
            }
            write_text(cfg.output_dir /
                           fmt::format("trace_q{}_l{}.csv", cell.n_qubits, cell.n_layers),
                       trace);
            summary += fmt::format("{},{},{},{},{},{},{},{}\n", cell.n_qubits, cell.n_layers,
                                   cell.runs.size(), num(cell.mean_trace.front()),
                                   num(cell.mean_final_loss()), num(lo), num(hi), stalled);
        }
        write_text(cfg.output_dir / "summary.csv", summary);
    }
    return result;
}

// ---- classification ----

void summarize(TrainReport &report) {
    if (report.folds.empty()) {
        report.mean_accuracy = report.std_accuracy = 0.0;
        return;
    }
    double sum = 0.0;
    for (const FoldResult &f : report.folds) {
        sum += f.test_accuracy;
    }
    const auto n = static_cast<double>(report.folds.size());
    report.mean_accuracy = sum / n;
    double ss = 0.0;
    for (const FoldResult &f : report.folds) {
        ss += (f.test_accuracy - report.mean_accuracy) * (f.test_accuracy - report.mean_accuracy);
    }
    report.std_accuracy = std::sqrt(ss / n);
}

namespace {

PreparedDataset prepare_cached(const DatasetBundle &bundle, const PrepareOptions &options,
                               bool scaled) {
    const char *cache_env = std::getenv("QSF_CACHE_DIR");
    if (cache_env == nullptr || *cache_env == '\0') {
        return prepare_samples(bundle, options);
    }
    const fs::path path =
        fs::path(cache_env) / prepared_cache_key(bundle.name + (scaled ? "-mm" : ""), options);
    if (fs::exists(path)) {
        PreparedDataset cached = load_prepared(path);
        if (cached.samples.size() == bundle.graphs.size()) {
            spdlog::info("loaded prepared samples from {}", path.string());
            return cached;
        }
        spdlog::warn("ignoring stale cache {}", path.string());
    }
    PreparedDataset fresh = prepare_samples(bundle, options);
    save_prepared(fresh, path);
    return fresh;
}

void check_isolation(const Fold &fold, int f) {
    std::vector<char> role_test;
    std::size_t max_index = 0;
    for (const auto *part : {&fold.train, &fold.validation, &fold.test}) {
        for (std::size_t i : *part) {
            max_index = std::max(max_index, i);
        }
    }
    role_test.assign(max_index + 1, 0);
    for (std::size_t i : fold.test) {
        role_test[i] = 1;
    }
    for (const auto *part : {&fold.train, &fold.validation}) {
        for (std::size_t i : *part) {
            if (role_test[i]) {
                throw Error(fmt::format("fold {}: sample {} is in both training and test", f, i));
            }
        }
    }
}

std::string checkpoint_name(int fold) { return fmt::format("fold_{:02}.json", fold); }

} // namespace

TrainReport run_cv_experiment(const ExperimentConfig &config, std::optional<int> max_folds) {
    if (config.dataset.name.empty()) {
        throw ConfigError("dataset.name is required");
    }
    DatasetBundle bundle = parse_tudataset(config.dataset.path, config.dataset.name);
    if (config.dataset.minmax_scale) {
        minmax_scale_attributes(bundle);
    }
    return run_cv_experiment(config, std::move(bundle), max_folds);
}

TrainReport run_cv_experiment(const ExperimentConfig &config, DatasetBundle bundle,
                              std::optional<int> max_folds) {
    config.validate();
    const TrainingSpec &ts = config.training;

    std::vector<int> labels;
    labels.reserve(bundle.graphs.size());
    for (const Graph &g : bundle.graphs) {
        labels.push_back(g.label);
    }
    const FoldPlan plan = stratified_kfold(labels, ts.folds, ts.val_fraction, config.seed);

    const int n_q = required_qubits(bundle, config.dataset.n_qubits);
    if (config.dataset.n_classes && *config.dataset.n_classes != bundle.n_classes) {
        spdlog::warn("{}: configured {} classes, dataset has {}", bundle.name,
                     *config.dataset.n_classes, bundle.n_classes);
    }
    PrepareOptions po;
    po.n_qubits = n_q;
    po.alpha_init = config.model.alpha_init;
    po.noise_low = config.model.noise_low;
    po.noise_high = config.model.noise_high;
    po.seed = config.seed;
    const PreparedDataset data = prepare_cached(bundle, po, config.dataset.minmax_scale);
    const std::span<const PreparedSample> samples(data.samples);

    const HybridConfig hc = hybrid_config(config, n_q, bundle.n_classes);
    TrainReport report;
    report.dataset = bundle.name;
    report.n_qubits = n_q;
    report.n_classes = bundle.n_classes;
    report.quantum_parameters = parameter_count(n_q, hc.n_layers);
    report.head_parameters = HeadModel::parameter_count(hc.head);
    report.total_parameters = report.quantum_parameters + report.head_parameters;
    report.config = config_to_json(config);
    if (config.expected.total_parameters &&
        *config.expected.total_parameters != report.total_parameters) {
        spdlog::warn("{}: {} parameters, configuration expects {}", bundle.name,
                     report.total_parameters, *config.expected.total_parameters);
    }

    const int n_folds = std::min(plan.k, max_folds.value_or(plan.k));
    report.folds.resize(static_cast<std::size_t>(n_folds));
    const bool write = !config.output_dir.empty();
    if (write) {
        fs::create_directories(config.output_dir / "checkpoints");
        write_text(config.output_dir / "config.json", config_to_json(config).dump(2) + "\n");
    }
    spdlog::info("{}: {} graphs, {} classes, {} qubits, {} parameters, {} folds", bundle.name,
                 bundle.graphs.size(), bundle.n_classes, n_q, report.total_parameters, n_folds);

    parallel_for(static_cast<std::size_t>(n_folds), worker_count(), [&](std::size_t fi) {
        const int f = static_cast<int>(fi);
        const Fold &fold = plan.folds[fi];
        check_isolation(fold, f);
        const auto start = std::chrono::steady_clock::now();

        Rng rng(config.seed ^ static_cast<std::uint64_t>(f));
        HybridModel model(hc, data.phase_draw, rng);
        HybridOptimizer opt;
        TrainState state;
        state.lr = ts.learning_rate;
        PlateauConfig pc;
        pc.factor = ts.scheduler_factor;
        pc.patience = ts.scheduler_patience;
        pc.threshold = ts.scheduler_threshold;

        const std::vector<std::size_t> &selection =
            fold.validation.empty() ? fold.train : fold.validation;
        HybridModel best = model;
        Evaluation best_val;
        best_val.accuracy = -1.0;
        int best_epoch = 0;
        std::vector<std::size_t> order = fold.train;
        const auto bs = static_cast<std::size_t>(ts.batch_size);
        for (int epoch = 1; epoch <= ts.epochs; ++epoch) {
            rng.shuffle(std::span<std::size_t>(order));
            double loss_sum = 0.0;
            int seen = 0;
            for (std::size_t b = 0; b < order.size(); b += bs) {
                const std::span<const std::size_t> batch(
                    order.data() + b, std::min(bs, order.size() - b));
                if (batch.size() < 2) {
                    continue;
                }
                try {
                    const BatchStats st =
                        train_batch(model, samples, batch, opt, state.lr, ts.weight_decay, rng);
                    loss_sum += st.loss * st.count;
                    seen += st.count;
                } catch (const NumericError &e) {
                    throw NumericError(fmt::format("fold {} epoch {} batch {} (lr {}): {}", f,
                                                   epoch, b / bs, state.lr, e.what()));
                }
            }
            const Evaluation val = evaluate(model, samples, selection);
            if (val.accuracy > best_val.accuracy ||
                (val.accuracy == best_val.accuracy && val.loss < best_val.loss)) {
                best = model;
                best_val = val;
                best_epoch = epoch;
            }
            lr_plateau_update(state, val.loss, pc);
            spdlog::debug("fold {} epoch {}: train loss {:.4f} val loss {:.4f} val acc {:.4f} "
                          "lr {:g}",
                          f, epoch, seen ? loss_sum / seen : 0.0, val.loss, val.accuracy,
                          state.lr);
        }

        const Evaluation test = evaluate(best, samples, fold.test);
        FoldResult &r = report.folds[fi];
        r.fold = f;
        r.best_epoch = best_epoch;
        r.val_accuracy = best_val.accuracy;
        r.val_loss = best_val.loss;
        r.test_accuracy = test.accuracy;
        r.test_loss = test.loss;
        r.n_train = fold.train.size();
        r.n_validation = fold.validation.size();
        r.n_test = fold.test.size();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        spdlog::info("{} fold {}: best epoch {}, val acc {:.4f}, test acc {:.4f} ({:.1f}s)",
                     bundle.name, f, best_epoch, r.val_accuracy, r.test_accuracy, r.seconds);
        if (write) {
            Checkpoint ck{best, f, best_epoch, fold.test, test.accuracy};
            save_checkpoint(ck, config.output_dir / "checkpoints" / checkpoint_name(f));
        }
    });

    summarize(report);
    spdlog::info("{}: test accuracy {:.4f} +- {:.4f}", bundle.name, report.mean_accuracy,
                 report.std_accuracy);
    if (write) {
        emit_report(report, ReportFormat::Csv, config.output_dir / "folds.csv");
        emit_report(report, ReportFormat::Json, config.output_dir / "summary.json");
    }
    return report;
}

ReportFormat parse_format(const std::string &text) {
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    if (text == "json") {
        return ReportFormat::Json;
    }
    throw ConfigError("unknown report format '" + text + "'");
}

json report_to_json(const TrainReport &r) {
    json folds = json::array();
    for (const FoldResult &f : r.folds) {
        folds.push_back({{"fold", f.fold},
                         {"best_epoch", f.best_epoch},
                         {"val_accuracy", f.val_accuracy},
                         {"val_loss", f.val_loss},
                         {"test_accuracy", f.test_accuracy},
                         {"test_loss", f.test_loss},
                         {"n_train", f.n_train},
                         {"n_validation", f.n_validation},
                         {"n_test", f.n_test},
                         {"seconds", f.seconds}});
    }
    return {{"dataset", r.dataset},
            {"n_qubits", r.n_qubits},
            {"n_classes", r.n_classes},
            {"quantum_parameters", r.quantum_parameters},
            {"head_parameters", r.head_parameters},
            {"total_parameters", r.total_parameters},
            {"mean_accuracy", r.mean_accuracy},
            {"std_accuracy", r.std_accuracy},
            {"folds", folds},
            {"config", r.config}};
}

TrainReport report_from_json(const json &j) {
    TrainReport r;
    try {
        r.dataset = j.at("dataset").get<std::string>();
        r.n_qubits = j.at("n_qubits").get<int>();
        r.n_classes = j.at("n_classes").get<int>();
        r.quantum_parameters = j.at("quantum_parameters").get<std::size_t>();
        r.head_parameters = j.at("head_parameters").get<std::size_t>();
        r.total_parameters = j.at("total_parameters").get<std::size_t>();
        r.mean_accuracy = j.at("mean_accuracy").get<double>();
        r.std_accuracy = j.at("std_accuracy").get<double>();
        for (const json &f : j.at("folds")) {
            FoldResult fr;
            fr.fold = f.at("fold").get<int>();
            fr.best_epoch = f.at("best_epoch").get<int>();
            fr.val_accuracy = f.at("val_accuracy").get<double>();
            fr.val_loss = f.at("val_loss").get<double>();
            fr.test_accuracy = f.at("test_accuracy").get<double>();
            fr.test_loss = f.at("test_loss").get<double>();
            fr.n_train = f.at("n_train").get<std::size_t>();
            fr.n_validation = f.at("n_validation").get<std::size_t>();
            fr.n_test = f.at("n_test").get<std::size_t>();
            fr.seconds = f.at("seconds").get<double>();
            r.folds.push_back(fr);
        }
        r.config = j.value("config", json::object());
    } catch (const json::exception &e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string format_report(const TrainReport &r, ReportFormat format) {
    if (format == ReportFormat::Json) {
        return report_to_json(r).dump(2) + "\n";
    }
    std::string out = "fold,best_epoch,val_metric,test_accuracy\n";
    double val_sum = 0.0;
    for (const FoldResult &f : r.folds) {
        out += fmt::format("{},{},{},{}\n", f.fold, f.best_epoch, num(f.val_accuracy),
                           num(f.test_accuracy));
        val_sum += f.val_accuracy;
    }
    const double val_mean = r.folds.empty() ? 0.0 : val_sum / static_cast<double>(r.folds.size());
    out += fmt::format("mean,,{},{}\n", num(val_mean), num(r.mean_accuracy));
    return out;
}

void emit_report(const TrainReport &report, ReportFormat format, const fs::path &path) {
    write_text(path, format_report(report, format));
}

TrainReport load_report(const fs::path &path) { return report_from_json(read_json(path)); }

// ---- checkpoints ----

void save_checkpoint(const Checkpoint &ck, const fs::path &path) {
    const HybridConfig &hc = ck.model.config();
    HeadModel head = ck.model.head;
    json blocks = json::object();
    for (const ParamBlock &b : head.params.blocks()) {
        blocks[b.name] = std::vector<double>(b.values.begin(), b.values.end());
    }
    auto vec = [](const Eigen::VectorXd &v) { return std::vector<double>(v.begin(), v.end()); };
    const json j = {
        {"fold", ck.fold},
        {"epoch", ck.epoch},
        {"test_accuracy", ck.test_accuracy},
        {"test_indices", ck.test_indices},
        {"n_qubits", hc.n_qubits},
        {"n_layers", hc.n_layers},
        {"alpha_init", hc.alpha_init},
        {"head",
         {{"h1", hc.head.h1},
          {"h2", hc.head.h2},
          {"n_classes", hc.head.n_classes},
          {"dropout", hc.head.dropout},
          {"bn_eps", hc.head.bn_eps},
          {"bn_momentum", hc.head.bn_momentum}}},
        {"quantum", ck.model.quantum},
        {"params", blocks},
        {"running_mean1", vec(head.running_mean1)},
        {"running_var1", vec(head.running_var1)},
        {"running_mean2", vec(head.running_mean2)},
        {"running_var2", vec(head.running_var2)},
    };
    write_text(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const fs::path &path) {
    const json j = read_json(path);
    try {
        HybridConfig hc;
        hc.n_qubits = j.at("n_qubits").get<int>();
        hc.n_layers = j.at("n_layers").get<int>();
        hc.alpha_init = j.at("alpha_init").get<double>();
        const json &h = j.at("head");
        hc.head.n_inputs = hc.n_qubits;
        hc.head.h1 = h.at("h1").get<int>();
        hc.head.h2 = h.at("h2").get<int>();
        hc.head.n_classes = h.at("n_classes").get<int>();
        hc.head.dropout = h.at("dropout").get<double>();
        hc.head.bn_eps = h.at("bn_eps").get<double>();
        hc.head.bn_momentum = h.at("bn_momentum").get<double>();

        PhaseMatrix zero;
        zero.entries = Eigen::MatrixXd::Zero(hc.n_qubits, hc.n_qubits);
        Rng rng(0);
        Checkpoint ck{HybridModel(hc, zero, rng), j.at("fold").get<int>(),
                      j.at("epoch").get<int>(),
                      j.at("test_indices").get<std::vector<std::size_t>>(),
                      j.at("test_accuracy").get<double>()};

        auto fill = [&](std::span<double> dst, const json &src, const std::string &what) {
            const auto v = src.get<std::vector<double>>();
            if (v.size() != dst.size()) {
                throw ParseError(path.string() + ": " + what + " has " +
                                 std::to_string(v.size()) + " values, expected " +
                                 std::to_string(dst.size()));
            }
            std::copy(v.begin(), v.end(), dst.begin());
        };
        fill(ck.model.quantum, j.at("quantum"), "quantum");
        for (ParamBlock &b : ck.model.head.params.blocks()) {
            fill(b.values, j.at("params").at(b.name), b.name);
        }
        HeadModel &head = ck.model.head;
        fill({head.running_mean1.data(), static_cast<std::size_t>(head.running_mean1.size())},
             j.at("running_mean1"), "running_mean1");
        fill({head.running_var1.data(), static_cast<std::size_t>(head.running_var1.size())},
             j.at("running_var1"), "running_var1");
        fill({head.running_mean2.data(), static_cast<std::size_t>(head.running_mean2.size())},
             j.at("running_mean2"), "running_mean2");
        fill({head.running_var2.data(), static_cast<std::size_t>(head.running_var2.size())},
             j.at("running_var2"), "running_var2");
        return ck;
    } catch (const json::exception &e) {
        throw ParseError(path.string() + ": malformed checkpoint: " + e.what());
    }
}

} // namespace qsf
