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
 * TUDataset loading, sample preparation and stratified cross-validation
 * splits.
 *
 * Text format (all ids 1-based):
 *   NAME_A.txt                 "i, j" per line, one directed edge each
 *   NAME_graph_indicator.txt   graph id of node k on line k
 *   NAME_graph_labels.txt      class value of graph g on line g
 *   NAME_node_labels.txt       optional, integer label per node
 *   NAME_node_attributes.txt   optional, comma-separated reals per node
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsf/graph.hpp"
#include "qsf/statevector.hpp"

namespace qsf {

struct DatasetBundle {
    std::string name;
    std::vector<Graph> graphs; ///< labels already remapped to 0..n_classes-1
    int n_classes = 0;
    int max_nodes = 0;
    int feature_dim = 0;

    // Layout of node_features: one-hot node labels first, then attributes.
    int node_label_dim = 0;
    int node_label_offset = 0; ///< smallest raw node label
    int attribute_dim = 0;
    std::vector<int> class_values; ///< raw graph label of each class index
};

/**
 * Reads NAME_*.txt from `directory` (or from `directory/raw`). Node labels
 * are one-hot encoded over [min, max] and concatenated with raw attributes.
 * Throws ParseError naming the file (and line) on malformed input.
 */
[[nodiscard]] DatasetBundle parse_tudataset(const std::filesystem::path &directory,
                                            const std::string &name);

/// Writes the bundle back in TUDataset form.
void write_tudataset(const DatasetBundle &bundle, const std::filesystem::path &directory);

/// Rescales attribute columns to [0, 1] over the whole dataset.
void minmax_scale_attributes(DatasetBundle &bundle);

/// Qubits for node-index bits plus feature bits, at least 1.
[[nodiscard]] int required_qubits(const DatasetBundle &bundle,
                                  std::optional<int> override_qubits = std::nullopt);

/// Node-index bits: ceil(log2(max_nodes)).
[[nodiscard]] int node_qubits(const DatasetBundle &bundle);

struct PreparedSample {
    StateVector encoded_state{1};
    ConnectionMatrix connection; ///< noise-augmented, n_q x n_q
    PhaseMatrix phase_init;
    int label = 0;
};

struct PrepareOptions {
    int n_qubits = 0;
    double alpha_init = 0.1;
    double noise_low = 0.001;
    double noise_high = 0.01;
    std::uint64_t seed = 42;
};

struct PreparedDataset {
    std::vector<PreparedSample> samples;
    /// Shared random part of the phase initialization (one draw per dataset).
    PhaseMatrix phase_draw;
    PrepareOptions options;
    int node_bits = 0;
};

/**
 * Pads every graph to 2^node_bits nodes and 2^(n_q - node_bits) features,
 * flattens node-major and amplitude-encodes it. The connection matrix
 * contracts the padded adjacency onto the node-index qubits (the high-order
 * ones), then noise is added to every entry. Phases mix the shared draw with
 * the noisy connection matrix. Sample i uses stream derive_seed(seed, i), so
 * the result does not depend on the worker count.
 * Throws CapacityError when n_q is too small.
 */
[[nodiscard]] PreparedDataset prepare_samples(const DatasetBundle &bundle,
                                              const PrepareOptions &options);

/// Binary cache of prepare_samples output.
void save_prepared(const PreparedDataset &data, const std::filesystem::path &path);
[[nodiscard]] PreparedDataset load_prepared(const std::filesystem::path &path);

/// File name that keys a cache entry by dataset and preparation options.
[[nodiscard]] std::string prepared_cache_key(const std::string &dataset,
                                             const PrepareOptions &options);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<Fold> folds;
};

/**
 * Stratified k-fold test partition; inside each fold's training portion a
 * stratified `val_fraction` is held out for model selection. Throws
 * ConfigError when a class has fewer than k members.
 */
[[nodiscard]] FoldPlan stratified_kfold(const std::vector<int> &labels, int k,
                                        double val_fraction, std::uint64_t seed);

} // namespace qsf
