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
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "qsf/error.hpp"
#include "qsf/experiment.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string dataset;
    std::string output;
    std::optional<std::uint64_t> seed;
};

void add_run_options(CLI::App *cmd, Overrides &o, bool with_dataset) {
    cmd->add_option("--config", o.config, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (with_dataset) {
        cmd->add_option("--dataset", o.dataset, "directory holding the TUDataset files");
    }
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--output", o.output, "output directory");
}

qsf::ExperimentConfig resolve(const Overrides &o, qsf::ExperimentKind kind) {
    qsf::ExperimentConfig cfg = qsf::load_config(o.config);
    cfg.kind = kind;
    if (!o.dataset.empty()) {
        cfg.dataset.path = o.dataset;
    }
    if (!o.output.empty()) {
        cfg.output_dir = o.output;
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    return cfg;
}

void print_summary(const qsf::TrainReport &r) {
    std::cout << r.dataset << ": " << r.folds.size() << " fold(s), " << r.total_parameters
              << " parameters (" << r.quantum_parameters << " quantum + " << r.head_parameters
              << " head), test accuracy " << r.mean_accuracy << " +- " << r.std_accuracy << "\n";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Graph classification with a quantum spectral filter circuit"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "log per-epoch progress");

    Overrides eigen_o, cv_o, train_o;
    auto *eigen = app.add_subcommand("eigen-approx", "eigenspace approximation study on random graphs");
    add_run_options(eigen, eigen_o, false);
    auto *cv = app.add_subcommand("cv", "stratified k-fold cross-validated classification");
    add_run_options(cv, cv_o, true);
    auto *train = app.add_subcommand("train", "train and test on the first fold only");
    add_run_options(train, train_o, true);

    std::string report_in, report_format = "csv", report_out;
    auto *report = app.add_subcommand("report", "re-emit a run summary");
    report->add_option("--in", report_in, "summary.json of a run")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--format", report_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    report->add_option("--out", report_out, "output file (default: stdout)");

    std::string params_config;
    auto *params = app.add_subcommand("params", "print the parameter count of a configuration");
    params->add_option("--config", params_config, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*eigen) {
            const qsf::ExperimentConfig cfg = resolve(eigen_o, qsf::ExperimentKind::EigenApprox);
            const qsf::EigenExperimentResult res = qsf::run_eigen_experiment(cfg);
            for (const qsf::EigenCell &cell : res.cells) {
                std::cout << "qubits " << cell.n_qubits << " layers " << cell.n_layers
                          << ": mean final loss " << cell.mean_final_loss() << "\n";
            }
        } else if (*cv) {
            print_summary(qsf::run_cv_experiment(resolve(cv_o, qsf::ExperimentKind::Cv)));
        } else if (*train) {
            print_summary(qsf::run_cv_experiment(resolve(train_o, qsf::ExperimentKind::Train), 1));
        } else if (*report) {
            const qsf::TrainReport r = qsf::load_report(report_in);
            const auto format = qsf::parse_format(report_format);
            if (report_out.empty()) {
                std::cout << qsf::format_report(r, format);
            } else {
                qsf::emit_report(r, format, report_out);
            }
        } else if (*params) {
            const qsf::ExperimentConfig cfg = qsf::load_config(params_config);
            const std::size_t total = qsf::planned_parameter_count(cfg);
            std::cout << total;
            if (cfg.expected.total_parameters) {
                std::cout << (total == *cfg.expected.total_parameters ? " (matches " : " (expected ")
                          << *cfg.expected.total_parameters << ")";
            }
            std::cout << "\n";
        }
    } catch (const qsf::ConfigError &e) {
        std::cerr << "qsf: configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "qsf: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
