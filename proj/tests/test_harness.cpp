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
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qsf/error.hpp"
#include "qsf/experiment.hpp"
#include "test_util.hpp"

using namespace qsf;
using qsf::testing::scratch_dir;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Rings against stars; node features mark hub-like nodes.
DatasetBundle rings_and_stars(int per_class) {
    DatasetBundle b;
    b.name = "RINGSTAR";
    b.n_classes = 2;
    b.feature_dim = 2;
    b.attribute_dim = 2;
    b.class_values = {0, 1};
    Rng rng(7);
    for (int g = 0; g < 2 * per_class; ++g) {
        const int n = 4 + static_cast<int>(rng.below(5));
        Graph gr;
        gr.label = g % 2;
        gr.adjacency = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const int j = gr.label == 0 ? i - 1 : 0;
            gr.adjacency(i, j) = gr.adjacency(j, i) = 1.0;
        }
        if (gr.label == 0) {
            gr.adjacency(0, n - 1) = gr.adjacency(n - 1, 0) = 1.0;
        }
        gr.node_features = Eigen::MatrixXd(n, 2);
        for (int i = 0; i < n; ++i) {
            gr.node_features(i, 0) = gr.adjacency.row(i).sum() / 4.0;
            gr.node_features(i, 1) = 0.5 + 0.25 * rng.uniform();
        }
        b.max_nodes = std::max(b.max_nodes, n);
        b.graphs.push_back(std::move(gr));
    }
    return b;
}

ExperimentConfig small_cv(const fs::path &out) {
    ExperimentConfig c;
    c.kind = ExperimentKind::Cv;
    c.output_dir = out;
    c.dataset.name = "RINGSTAR";
    c.model.n_layers = 2;
    c.model.h1 = 8;
    c.model.h2 = 4;
    c.training.batch_size = 8;
    c.training.epochs = 6;
    c.training.folds = 3;
    return c;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("configuration round-trips through JSON") {
    ExperimentConfig c = small_cv("runs/x");
    c.dataset.n_qubits = 7;
    c.expected.total_parameters = 1234;
    c.eigen.layers = {3, 5};
    const ExperimentConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.dataset.n_qubits == 7);
    CHECK_FALSE(back.dataset.n_classes.has_value());

    CHECK_THROWS_AS((void)config_from_json(nlohmann::json{{"experiment", "bogus"}}), ConfigError);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json{{"training", {{"epochs", "many"}}}}),
                    ConfigError);
    ExperimentConfig bad = c;
    bad.training.batch_size = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("shipped configurations reproduce the parameter counts") {
    int checked = 0;
    for (const auto &e : fs::directory_iterator(fs::path(QSF_SOURCE_DIR) / "configs")) {
        const ExperimentConfig c = load_config(e.path());
        if (c.kind == ExperimentKind::EigenApprox) {
            continue;
        }
        INFO(e.path().filename().string());
        REQUIRE(c.expected.total_parameters.has_value());
        CHECK(planned_parameter_count(c) == *c.expected.total_parameters);
        const int q = *c.dataset.n_qubits;
        CHECK(planned_parameter_count(c) ==
              static_cast<std::size_t>(c.model.n_layers * q * q) +
                  HeadModel::parameter_count(hybrid_config(c, q, *c.dataset.n_classes).head));
        ++checked;
    }
    CHECK(checked == 13);
}

TEST_CASE("cross-validation is deterministic and self-consistent") {
    const fs::path root = scratch_dir("cv");
    const DatasetBundle data = rings_and_stars(15);
    write_tudataset(data, root / "data");

    ExperimentConfig c = small_cv(root / "a");
    c.dataset.path = root / "data";
    ::setenv("QSF_THREADS", "1", 1);
    const TrainReport ra = run_cv_experiment(c);
    ::setenv("QSF_THREADS", "3", 1);
    c.output_dir = root / "b";
    const TrainReport rb = run_cv_experiment(c);
    ::unsetenv("QSF_THREADS");

    CHECK(slurp(root / "a" / "folds.csv") == slurp(root / "b" / "folds.csv"));
    CHECK(ra.mean_accuracy == rb.mean_accuracy);
    REQUIRE(ra.folds.size() == 3);
    MESSAGE("synthetic CV accuracy " << ra.mean_accuracy);
    CHECK(ra.mean_accuracy > 0.5);

    // Parameter accounting.
    CHECK(ra.n_qubits == 4);
    CHECK(ra.quantum_parameters == 2 * 16);
    CHECK(ra.total_parameters == ra.quantum_parameters + ra.head_parameters);

    // CSV: header, one row per fold, one summary row.
    const std::string csv = slurp(root / "a" / "folds.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.rfind("fold,best_epoch,val_metric,test_accuracy\n", 0) == 0);
    double sum = 0.0;
    for (const FoldResult &f : ra.folds) {
        sum += f.test_accuracy;
        CHECK(f.best_epoch >= 1);
        CHECK(f.best_epoch <= 6);
        CHECK(f.n_train + f.n_validation + f.n_test == 30);
    }
    CHECK(std::abs(ra.mean_accuracy - sum / 3) <= 1e-12);

    // JSON round trip.
    const TrainReport loaded = load_report(root / "a" / "summary.json");
    CHECK(report_to_json(loaded) == report_to_json(ra));
    CHECK(format_report(loaded, ReportFormat::Csv) == csv);
    CHECK(loaded.config.at("dataset").at("name") == "RINGSTAR");
    CHECK(fs::exists(root / "a" / "config.json"));

    // Checkpoint fidelity.
    PrepareOptions po;
    po.n_qubits = ra.n_qubits;
    po.alpha_init = c.model.alpha_init;
    po.seed = c.seed;
    const PreparedDataset prepared = prepare_samples(parse_tudataset(root / "data", "RINGSTAR"), po);
    for (const FoldResult &f : ra.folds) {
        const Checkpoint ck =
            load_checkpoint(root / "a" / "checkpoints" / ("fold_0" + std::to_string(f.fold) + ".json"));
        CHECK(ck.epoch == f.best_epoch);
        CHECK(ck.model.parameter_count() == ra.total_parameters);
        const Evaluation ev = evaluate(ck.model, prepared.samples, ck.test_indices);
        CHECK(ev.accuracy == f.test_accuracy);
        CHECK(ev.loss == f.test_loss);
    }

    // Single-split training.
    c.output_dir = root / "train";
    const TrainReport single = run_cv_experiment(c, 1);
    CHECK(single.folds.size() == 1);
    CHECK(single.folds[0].test_accuracy == ra.folds[0].test_accuracy);
}

TEST_CASE("stratification problems surface before training") {
    const fs::path root = scratch_dir("strat");
    DatasetBundle data = rings_and_stars(15);
    for (int i = 0; i < 27; ++i) {
        data.graphs[static_cast<std::size_t>(i)].label = 0;
    }
    ExperimentConfig c = small_cv(root / "out");
    c.training.folds = 10;
    try {
        (void)run_cv_experiment(c, data);
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(std::string(e.what()).find("class 1") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(root / "out" / "config.json"));
}

TEST_CASE("missing dataset directory reports the file") {
    ExperimentConfig c = small_cv("");
    c.dataset.path = scratch_dir("empty_data");
    CHECK_THROWS_AS((void)run_cv_experiment(c), ParseError);
}

TEST_CASE("eigen study cell writes traces and converges") {
    const fs::path out = scratch_dir("eigen");
    ExperimentConfig c;
    c.kind = ExperimentKind::EigenApprox;
    c.output_dir = out;
    c.eigen.qubits = {3};
    c.eigen.layers = {20};
    c.eigen.graphs = 3;
    const EigenExperimentResult r = run_eigen_experiment(c);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].runs.size() == 3);
    CHECK(r.cells[0].mean_final_loss() < 0.05);
    const std::string trace = slurp(out / "trace_q3_l20.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + 4 * 500);
    CHECK(trace.find("mean,499,") != std::string::npos);
    const std::string summary = slurp(out / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 2);

    // Graphs are shared across layer counts and depend only on (seed, qubits, id).
    CHECK(eigen_graph(42, 3, 1, 0.3).adjacency == eigen_graph(42, 3, 1, 0.3).adjacency);
    CHECK(eigen_graph(42, 3, 1, 0.3).adjacency != eigen_graph(42, 3, 2, 0.3).adjacency);

    const fs::path again = scratch_dir("eigen_again");
    c.output_dir = again;
    (void)run_eigen_experiment(c);
    CHECK(slurp(out / "trace_q3_l20.csv") == slurp(again / "trace_q3_l20.csv"));
}

TEST_CASE("two-qubit cell with degenerate graphs completes and flags stalls") {
    ExperimentConfig c;
    c.kind = ExperimentKind::EigenApprox;
    c.seed = 2;
    c.eigen.qubits = {2};
    c.eigen.layers = {4};
    c.eigen.iterations = 300;
    const EigenExperimentResult r = run_eigen_experiment(c, false);
    int stalled = 0;
    int isolated = 0;
    for (const EigenRun &run : r.cells[0].runs) {
        stalled += run.stalled ? 1 : 0;
        isolated += run.isolated_node ? 1 : 0;
        for (double v : run.trace.losses) {
            CHECK(std::isfinite(v));
        }
    }
    CHECK(stalled >= 1);
    CHECK(isolated >= 1);
}

TEST_CASE("stall predicate") {
    CHECK(loss_stalled(std::vector<double>(100, 1.0)));
    CHECK_FALSE(loss_stalled(std::vector<double>(100, 1e-6)));
    std::vector<double> falling(100);
    for (std::size_t i = 0; i < falling.size(); ++i) {
        falling[i] = 1.0 - 0.009 * static_cast<double>(i);
    }
    CHECK_FALSE(loss_stalled(falling));
}

TEST_CASE("empty layer list is rejected before any work") {
    ExperimentConfig c;
    c.kind = ExperimentKind::EigenApprox;
    c.output_dir = scratch_dir("eigen_empty") / "out";
    c.eigen.layers.clear();
    CHECK_THROWS_AS((void)run_eigen_experiment(c), ConfigError);
    CHECK_FALSE(fs::exists(c.output_dir));
}

TEST_CASE("oversized eigen cell is rejected") {
    ExperimentConfig c;
    c.kind = ExperimentKind::EigenApprox;
    c.eigen.qubits = {13};
    CHECK_THROWS_AS((void)run_eigen_experiment(c, false), ConfigError);
}

} // TEST_SUITE
