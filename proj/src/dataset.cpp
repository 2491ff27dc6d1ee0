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
#include "qsf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qsf/error.hpp"
#include "qsf/parallel.hpp"
#include "qsf/random.hpp"

namespace fs = std::filesystem;

namespace qsf {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

struct LineReader {
    fs::path path;
    std::ifstream in;
    std::size_t line_no = 0;

    explicit LineReader(fs::path p) : path(std::move(p)), in(path) {
        if (!in) {
            throw ParseError("cannot open " + path.string());
        }
    }

    // Next non-empty line; false at end of file.
    bool next(std::string &line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) {
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError(path.filename().string() + ":" + std::to_string(line_no) + ": " + what);
    }
};

template <typename T> T parse_number(std::string_view field, const LineReader &reader) {
    field = trim(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        reader.fail("cannot parse '" + std::string(field) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_row(const std::string &line, const LineReader &reader) {
    std::vector<T> out;
    std::string_view rest = line;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(parse_number<T>(rest.substr(0, comma), reader));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    return out;
}

fs::path locate(const fs::path &directory, const std::string &name) {
    for (const fs::path &dir : {directory, directory / name, directory / "raw",
                                directory / name / "raw"}) {
        if (fs::exists(dir / (name + "_A.txt"))) {
            return dir;
        }
    }
    return directory;
}

fs::path required_file(const fs::path &dir, const std::string &name, const char *suffix) {
    fs::path p = dir / (name + suffix);
    if (!fs::exists(p)) {
        throw ParseError("missing mandatory file " + p.string());
    }
    return p;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T> void write_pod(std::ofstream &out, const T &v) {
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T> T read_pod(std::ifstream &in) {
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in) {
        throw ParseError("truncated prepared-sample cache");
    }
    return v;
}

void write_matrix(std::ofstream &out, const Eigen::MatrixXd &m) {
    out.write(reinterpret_cast<const char *>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Eigen::MatrixXd read_matrix(std::ifstream &in, int n) {
    Eigen::MatrixXd m(n, n);
    in.read(reinterpret_cast<char *>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) {
        throw ParseError("truncated prepared-sample cache");
    }
    return m;
}

constexpr char kCacheMagic[8] = {'Q', 'S', 'F', 'P', 'R', 'E', 'P', '1'};

} // namespace

DatasetBundle parse_tudataset(const fs::path &directory, const std::string &name) {
    const fs::path dir = locate(directory, name);
    const fs::path edges_path = required_file(dir, name, "_A.txt");
    const fs::path indicator_path = required_file(dir, name, "_graph_indicator.txt");
    const fs::path labels_path = required_file(dir, name, "_graph_labels.txt");

    DatasetBundle bundle;
    bundle.name = name;
    std::string line;

    // Graph membership of every node.
    std::vector<int> node_graph;
    std::vector<int> node_local;
    std::vector<int> graph_sizes;
    {
        LineReader r(indicator_path);
        while (r.next(line)) {
            const int g = parse_number<int>(line, r);
            if (g < 1) {
                r.fail("graph ids are 1-based");
            }
            if (static_cast<std::size_t>(g) > graph_sizes.size()) {
                graph_sizes.resize(static_cast<std::size_t>(g), 0);
            }
            node_graph.push_back(g - 1);
            node_local.push_back(graph_sizes[static_cast<std::size_t>(g - 1)]++);
        }
    }
    const std::size_t n_nodes = node_graph.size();
    const std::size_t n_graphs = graph_sizes.size();

    std::vector<int> raw_labels;
    {
        LineReader r(labels_path);
        while (r.next(line)) {
            raw_labels.push_back(parse_number<int>(line, r));
        }
        if (raw_labels.size() != n_graphs) {
            throw ParseError(labels_path.filename().string() + ": " +
                             std::to_string(raw_labels.size()) + " labels for " +
                             std::to_string(n_graphs) + " graphs");
        }
    }
    const std::set<int> distinct(raw_labels.begin(), raw_labels.end());
    bundle.class_values.assign(distinct.begin(), distinct.end());
    bundle.n_classes = static_cast<int>(bundle.class_values.size());

    std::vector<int> node_labels;
    if (const fs::path p = dir / (name + "_node_labels.txt"); fs::exists(p)) {
        LineReader r(p);
        while (r.next(line)) {
            node_labels.push_back(parse_row<int>(line, r).front());
        }
        if (node_labels.size() != n_nodes) {
            throw ParseError(p.filename().string() + ": expected " + std::to_string(n_nodes) +
                             " node labels");
        }
        const auto [mn, mx] = std::minmax_element(node_labels.begin(), node_labels.end());
        bundle.node_label_offset = *mn;
        bundle.node_label_dim = *mx - *mn + 1;
    }

    std::vector<std::vector<double>> attributes;
    if (const fs::path p = dir / (name + "_node_attributes.txt"); fs::exists(p)) {
        LineReader r(p);
        while (r.next(line)) {
            attributes.push_back(parse_row<double>(line, r));
            if (attributes.back().size() != attributes.front().size()) {
                r.fail("inconsistent attribute count");
            }
        }
        if (attributes.size() != n_nodes) {
            throw ParseError(p.filename().string() + ": expected " + std::to_string(n_nodes) +
                             " attribute rows");
        }
        bundle.attribute_dim = static_cast<int>(attributes.front().size());
    }
    bundle.feature_dim = bundle.node_label_dim + bundle.attribute_dim;

    bundle.graphs.resize(n_graphs);
    for (std::size_t g = 0; g < n_graphs; ++g) {
        Graph &gr = bundle.graphs[g];
        gr.adjacency = Eigen::MatrixXd::Zero(graph_sizes[g], graph_sizes[g]);
        gr.node_features = Eigen::MatrixXd::Zero(graph_sizes[g], bundle.feature_dim);
        gr.label = static_cast<int>(
            std::lower_bound(bundle.class_values.begin(), bundle.class_values.end(),
                             raw_labels[g]) -
            bundle.class_values.begin());
        bundle.max_nodes = std::max(bundle.max_nodes, graph_sizes[g]);
    }
    for (std::size_t v = 0; v < n_nodes; ++v) {
        Graph &gr = bundle.graphs[static_cast<std::size_t>(node_graph[v])];
        const int local = node_local[v];
        if (!node_labels.empty()) {
            gr.node_features(local, node_labels[v] - bundle.node_label_offset) = 1.0;
        }
        for (int a = 0; a < bundle.attribute_dim; ++a) {
            gr.node_features(local, bundle.node_label_dim + a) = attributes[v][a];
        }
    }

    {
        LineReader r(edges_path);
        while (r.next(line)) {
            const auto ends = parse_row<long long>(line, r);
            if (ends.size() != 2) {
                r.fail("expected 'i, j'");
            }
            for (long long e : ends) {
                if (e < 1 || static_cast<std::size_t>(e) > n_nodes) {
                    r.fail("edge references unknown node " + std::to_string(e));
                }
            }
            const auto i = static_cast<std::size_t>(ends[0] - 1);
            const auto j = static_cast<std::size_t>(ends[1] - 1);
            if (node_graph[i] != node_graph[j]) {
                r.fail("edge joins nodes of different graphs");
            }
            if (i == j) {
                continue;
            }
            Graph &gr = bundle.graphs[static_cast<std::size_t>(node_graph[i])];
            gr.adjacency(node_local[i], node_local[j]) = 1.0;
            gr.adjacency(node_local[j], node_local[i]) = 1.0;
        }
    }
    return bundle;
}

void write_tudataset(const DatasetBundle &bundle, const fs::path &directory) {
    fs::create_directories(directory);
    const std::string &name = bundle.name;
    auto open = [&](const char *suffix) {
        std::ofstream out(directory / (name + suffix));
        if (!out) {
            throw Error("cannot write " + (directory / (name + suffix)).string());
        }
        return out;
    };
    std::ofstream edges = open("_A.txt");
    std::ofstream indicator = open("_graph_indicator.txt");
    std::ofstream labels = open("_graph_labels.txt");
    std::ofstream node_labels;
    std::ofstream attributes;
    if (bundle.node_label_dim > 0) {
        node_labels = open("_node_labels.txt");
    }
    if (bundle.attribute_dim > 0) {
        attributes = open("_node_attributes.txt");
    }

    std::size_t base = 1;
    for (std::size_t g = 0; g < bundle.graphs.size(); ++g) {
        const Graph &gr = bundle.graphs[g];
        labels << bundle.class_values.at(static_cast<std::size_t>(gr.label)) << '\n';
        for (int v = 0; v < gr.n_nodes(); ++v) {
            indicator << g + 1 << '\n';
            if (bundle.node_label_dim > 0) {
                Eigen::Index hot = 0;
                gr.node_features.row(v).head(bundle.node_label_dim).maxCoeff(&hot);
                node_labels << hot + bundle.node_label_offset << '\n';
            }
            if (bundle.attribute_dim > 0) {
                for (int a = 0; a < bundle.attribute_dim; ++a) {
                    attributes << (a ? ", " : "")
                               << format_double(gr.node_features(v, bundle.node_label_dim + a));
                }
                attributes << '\n';
            }
            for (int u = 0; u < gr.n_nodes(); ++u) {
                if (gr.adjacency(v, u) != 0.0) {
                    edges << base + v << ", " << base + u << '\n';
                }
            }
        }
        base += static_cast<std::size_t>(gr.n_nodes());
    }
}

void minmax_scale_attributes(DatasetBundle &bundle) {
    for (int a = 0; a < bundle.attribute_dim; ++a) {
        const int col = bundle.node_label_dim + a;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const Graph &g : bundle.graphs) {
            if (g.n_nodes() > 0) {
                lo = std::min(lo, g.node_features.col(col).minCoeff());
                hi = std::max(hi, g.node_features.col(col).maxCoeff());
            }
        }
        const double span = hi - lo;
        for (Graph &g : bundle.graphs) {
            for (int v = 0; v < g.n_nodes(); ++v) {
                g.node_features(v, col) = span > 0.0 ? (g.node_features(v, col) - lo) / span : 0.0;
            }
        }
    }
}

int node_qubits(const DatasetBundle &bundle) {
    return ceil_log2(static_cast<std::uint64_t>(std::max(bundle.max_nodes, 1)));
}

int required_qubits(const DatasetBundle &bundle, std::optional<int> override_qubits) {
    if (override_qubits) {
        return *override_qubits;
    }
    const int bits = node_qubits(bundle) +
                     ceil_log2(static_cast<std::uint64_t>(std::max(bundle.feature_dim, 1)));
    return std::max(bits, 1);
}

PreparedDataset prepare_samples(const DatasetBundle &bundle, const PrepareOptions &options) {
    const int node_bits = node_qubits(bundle);
    const int feat_bits = options.n_qubits - node_bits;
    const int needed = required_qubits(bundle);
    if (options.n_qubits < needed || feat_bits < 0) {
        throw CapacityError(bundle.name + " requires " + std::to_string(needed) +
                            " qubits but only " + std::to_string(options.n_qubits) +
                            " are available");
    }
    if (options.n_qubits > 20) {
        throw CapacityError("prepare_samples supports at most 20 qubits");
    }
    const int n_q = options.n_qubits;
    const int padded_nodes = 1 << node_bits;
    const int padded_feats = 1 << feat_bits;

    PreparedDataset out;
    out.options = options;
    out.node_bits = node_bits;
    {
        Rng draw_rng(derive_seed(options.seed, ~std::uint64_t{0}));
        out.phase_draw = random_phases(n_q, draw_rng);
    }
    out.samples.resize(bundle.graphs.size());

    parallel_for(bundle.graphs.size(), worker_count(), [&](std::size_t i) {
        Rng rng(derive_seed(options.seed, i));
        const Graph padded = pad_graph(bundle.graphs[i], padded_nodes, padded_feats);
        std::vector<double> flat(static_cast<std::size_t>(padded_nodes) * padded_feats);
        for (int v = 0; v < padded_nodes; ++v) {
            for (int f = 0; f < padded_feats; ++f) {
                flat[static_cast<std::size_t>(v) * padded_feats + f] = padded.node_features(v, f);
            }
        }
        PreparedSample &s = out.samples[i];
        s.label = padded.label;
        s.encoded_state = amplitude_encode(flat);

        ConnectionMatrix m;
        m.entries = Eigen::MatrixXd::Zero(n_q, n_q);
        m.entries.topLeftCorner(node_bits, node_bits) =
            qubit_connection_matrix(padded.adjacency, node_bits).entries;
        s.connection = add_connection_noise(m, options.noise_low, options.noise_high, rng);
        s.phase_init = mix_phases(s.connection, out.phase_draw, options.alpha_init);
    });
    return out;
}

std::string prepared_cache_key(const std::string &dataset, const PrepareOptions &o) {
    std::ostringstream key;
    key << dataset << "-q" << o.n_qubits << "-a" << format_double(o.alpha_init) << "-n"
        << format_double(o.noise_low) << "_" << format_double(o.noise_high) << "-s" << o.seed
        << ".qsfprep";
    return key.str();
}

void save_prepared(const PreparedDataset &data, const fs::path &path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write cache " + path.string());
    }
    out.write(kCacheMagic, sizeof(kCacheMagic));
    const auto &o = data.options;
    write_pod(out, static_cast<std::int32_t>(o.n_qubits));
    write_pod(out, o.alpha_init);
    write_pod(out, o.noise_low);
    write_pod(out, o.noise_high);
    write_pod(out, o.seed);
    write_pod(out, static_cast<std::int32_t>(data.node_bits));
    write_pod(out, static_cast<std::uint64_t>(data.samples.size()));
    write_matrix(out, data.phase_draw.entries);
    for (const auto &s : data.samples) {
        write_pod(out, static_cast<std::int32_t>(s.label));
        const auto amps = s.encoded_state.amplitudes();
        out.write(reinterpret_cast<const char *>(amps.data()),
                  static_cast<std::streamsize>(amps.size() * sizeof(Complex)));
        write_matrix(out, s.connection.entries);
        write_matrix(out, s.phase_init.entries);
    }
}

PreparedDataset load_prepared(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open cache " + path.string());
    }
    char magic[sizeof(kCacheMagic)];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kCacheMagic))) {
        throw ParseError(path.string() + " is not a prepared-sample cache");
    }
    PreparedDataset data;
    auto &o = data.options;
    o.n_qubits = read_pod<std::int32_t>(in);
    o.alpha_init = read_pod<double>(in);
    o.noise_low = read_pod<double>(in);
    o.noise_high = read_pod<double>(in);
    o.seed = read_pod<std::uint64_t>(in);
    data.node_bits = read_pod<std::int32_t>(in);
    const auto count = read_pod<std::uint64_t>(in);
    if (o.n_qubits < 1 || o.n_qubits > 20) {
        throw ParseError("corrupt cache header in " + path.string());
    }
    data.phase_draw.entries = read_matrix(in, o.n_qubits);
    data.samples.resize(count);
    const std::size_t dim = std::size_t{1} << o.n_qubits;
    for (auto &s : data.samples) {
        s.label = read_pod<std::int32_t>(in);
        std::vector<Complex> amps(dim);
        in.read(reinterpret_cast<char *>(amps.data()),
                static_cast<std::streamsize>(dim * sizeof(Complex)));
        if (!in) {
            throw ParseError("truncated prepared-sample cache");
        }
        s.encoded_state = StateVector(o.n_qubits, std::move(amps));
        s.connection.entries = read_matrix(in, o.n_qubits);
        s.phase_init.entries = read_matrix(in, o.n_qubits);
    }
    return data;
}

FoldPlan stratified_kfold(const std::vector<int> &labels, int k, double val_fraction,
                          std::uint64_t seed) {
    if (k < 2) {
        throw ConfigError("stratified_kfold needs k >= 2");
    }
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
        throw ConfigError("validation fraction must lie in [0, 1)");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(i);
    }
    for (const auto &[cls, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(k)) {
            throw ConfigError("class " + std::to_string(cls) + " has " +
                              std::to_string(members.size()) + " members, fewer than k = " +
                              std::to_string(k));
        }
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.folds.resize(static_cast<std::size_t>(k));
    Rng rng(seed);
    std::vector<int> fold_of(labels.size(), -1);
    std::size_t offset = 0;
    for (auto &[cls, members] : by_class) {
        rng.shuffle(std::span<std::size_t>(members));
        for (std::size_t j = 0; j < members.size(); ++j) {
            fold_of[members[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
        }
        offset += members.size();
    }

    for (int f = 0; f < k; ++f) {
        Fold &fold = plan.folds[static_cast<std::size_t>(f)];
        Rng val_rng(derive_seed(seed, static_cast<std::uint64_t>(f)));
        for (auto &[cls, members] : by_class) {
            std::vector<std::size_t> train_c;
            for (std::size_t i : members) {
                (fold_of[i] == f ? fold.test : train_c).push_back(i);
            }
            std::sort(train_c.begin(), train_c.end());
            val_rng.shuffle(std::span<std::size_t>(train_c));
            auto n_val = static_cast<std::size_t>(
                std::llround(val_fraction * static_cast<double>(train_c.size())));
            n_val = std::min(n_val, train_c.size() > 0 ? train_c.size() - 1 : 0);
            fold.validation.insert(fold.validation.end(), train_c.begin(),
                                   train_c.begin() + static_cast<std::ptrdiff_t>(n_val));
            fold.train.insert(fold.train.end(),
                              train_c.begin() + static_cast<std::ptrdiff_t>(n_val),
                              train_c.end());
        }
        std::sort(fold.train.begin(), fold.train.end());
        std::sort(fold.validation.begin(), fold.validation.end());
        std::sort(fold.test.begin(), fold.test.end());
    }
    return plan;
}

} // namespace qsf
