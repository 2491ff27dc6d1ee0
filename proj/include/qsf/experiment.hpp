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
 * Experiment orchestration: the eigenspace study over random graphs and
 * cross-validated graph classification, plus reports and checkpoints.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsf/dataset.hpp"
#include "qsf/hybrid.hpp"
#include "qsf/spectral.hpp"

namespace qsf {

enum class ExperimentKind { EigenApprox, Train, Cv };

struct DatasetSpec {
    std::string name;
    std::filesystem::path path;
    std::optional<int> n_qubits;  ///< overrides the derived qubit count
    std::optional<int> n_classes; ///< expected class count, for accounting before parsing
    bool minmax_scale = false;
};

struct EigenSpec {
    std::vector<int> qubits{2, 3, 4};
    std::vector<int> layers{1, 4, 8, 20};
    int graphs = 10;
    double edge_prob = 0.3;
    int iterations = 500;
    double learning_rate = 0.01;
    double alpha_init = 0.5;
};

struct ModelSpec {
    int n_layers = 4;
    int h1 = 32;
    int h2 = 16;
    double dropout = 0.25;
    double alpha_init = 0.1;
    double noise_low = 0.001;
    double noise_high = 0.01;
};

struct TrainingSpec {
    int batch_size = 32;
    int epochs = 50;
    double learning_rate = 0.01;
    double weight_decay = 1e-5;
    double scheduler_factor = 0.1;
    int scheduler_patience = 15;
    double scheduler_threshold = 1e-4;
    int folds = 10;
    double val_fraction = 0.1;
};

/// Reference numbers a configuration is expected to reproduce.
struct Expectation {
    std::optional<std::size_t> total_parameters;
    std::optional<double> mean_accuracy;
    std::optional<double> std_accuracy;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Cv;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "runs/default";
    DatasetSpec dataset;
    EigenSpec eigen;
    ModelSpec model;
    TrainingSpec training;
    Expectation expected;

    /// Throws ConfigError for out-of-range values.
    void validate() const;
};

[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig &config);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path &path);

[[nodiscard]] std::string to_string(ExperimentKind kind);
[[nodiscard]] ExperimentKind parse_kind(const std::string &text);

/**
 * Quantum plus head parameters for a run with `n_qubits` and `n_classes`.
 * Throws ConfigError when either is unknown (zero) and not in the config.
 */
[[nodiscard]] HybridConfig hybrid_config(const ExperimentConfig &config, int n_qubits,
                                         int n_classes);
[[nodiscard]] std::size_t planned_parameter_count(const ExperimentConfig &config);

// ---- eigenspace study ----

struct EigenRun {
    int graph_id = 0;
    LossTrace trace;
    bool stalled = false;
    bool isolated_node = false; ///< the graph has an all-zero adjacency row
};

struct EigenCell {
    int n_qubits = 0;
    int n_layers = 0;
    std::vector<EigenRun> runs;
    std::vector<double> mean_trace;

    [[nodiscard]] double mean_final_loss() const { return mean_trace.back(); }
};

struct EigenExperimentResult {
    std::vector<EigenCell> cells;
};

/**
 * True when a trace ends above 1e-3 after improving by less than 1e-4
 * (relative) over its last tenth.
 */
[[nodiscard]] bool loss_stalled(const std::vector<double> &losses);

/// Graph `graph_id` of the `n_qubits` column; shared by every layer count.
[[nodiscard]] Graph eigen_graph(std::uint64_t seed, int n_qubits, int graph_id, double edge_prob);

/**
 * Runs every (qubits, layers) cell. With an output directory set, writes
 * trace_q<Q>_l<L>.csv per cell and summary.csv. Throws ConfigError on an
 * empty qubit or layer list before any work starts.
 */
EigenExperimentResult run_eigen_experiment(const ExperimentConfig &config, bool write_files = true);

// ---- classification ----

struct FoldResult {
    int fold = 0;
    int best_epoch = 0;
    double val_accuracy = 0.0;
    double val_loss = 0.0;
    double test_accuracy = 0.0;
    double test_loss = 0.0;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_test = 0;
    double seconds = 0.0;
};

struct TrainReport {
    std::string dataset;
    int n_qubits = 0;
    int n_classes = 0;
    std::size_t quantum_parameters = 0;
    std::size_t head_parameters = 0;
    std::size_t total_parameters = 0;
    std::vector<FoldResult> folds;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0; ///< population std over folds
    nlohmann::json config;
};

/// Mean and population std of fold test accuracies.
void summarize(TrainReport &report);

/**
 * Loads the dataset, prepares samples (through QSF_CACHE_DIR when set) and
 * trains one fresh model per fold. `max_folds` limits how many folds of the
 * plan are run; the train command uses 1.
 */
TrainReport run_cv_experiment(const ExperimentConfig &config,
                              std::optional<int> max_folds = std::nullopt);

/// Same as above on an already parsed bundle.
TrainReport run_cv_experiment(const ExperimentConfig &config, DatasetBundle bundle,
                              std::optional<int> max_folds = std::nullopt);

enum class ReportFormat { Csv, Json };

[[nodiscard]] ReportFormat parse_format(const std::string &text);
[[nodiscard]] std::string format_report(const TrainReport &report, ReportFormat format);
void emit_report(const TrainReport &report, ReportFormat format,
                 const std::filesystem::path &path);
[[nodiscard]] TrainReport load_report(const std::filesystem::path &path);
[[nodiscard]] nlohmann::json report_to_json(const TrainReport &report);
[[nodiscard]] TrainReport report_from_json(const nlohmann::json &j);

// ---- checkpoints ----

struct Checkpoint {
    HybridModel model;
    int fold = 0;
    int epoch = 0;
    std::vector<std::size_t> test_indices;
    double test_accuracy = 0.0;
};

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path &path);

} // namespace qsf
