#include "ccgc/graph.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ccgc/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace ccgc {

namespace {

std::ifstream open_or_throw(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw std::runtime_error("missing file: " + p.string());
    return f;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

DenseMatrix read_features_csv(const fs::path& path) {
    std::ifstream f = open_or_throw(path);
    std::vector<double> data;
    std::size_t cols = 0, row = 0;
    std::string line;
    while (std::getline(f, line)) {
        strip_cr(line);
        if (line.empty() && f.peek() == EOF) break;  // trailing newline
        std::size_t col = 0, pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string cell = line.substr(pos, comma - pos);
            double v = 0.0;
            const char* begin = cell.c_str();
            char* end = nullptr;
            errno = 0;
            v = std::strtod(begin, &end);
            while (end && *end == ' ') ++end;
            if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v))
                throw std::runtime_error("features.csv: non-numeric cell at row " +
                                         std::to_string(row + 1) + ", column " +
                                         std::to_string(col + 1));
            data.push_back(v);
            ++col;
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        if (row == 0) {
            cols = col;
        } else if (col != cols) {
            throw std::runtime_error("features.csv: row " + std::to_string(row + 1) +
                                     " has " + std::to_string(col) + " cells, expected " +
                                     std::to_string(cols));
        }
        ++row;
    }
    if (row == 0) throw std::runtime_error("features.csv: empty");
    DenseMatrix m(row, cols);
    m.data = std::move(data);
    return m;
}

}  // namespace

GraphDataset load_dataset(const std::string& dir, LoadInfo* info) {
    const fs::path base(dir);
    GraphDataset d;
    d.features = read_features_csv(base / "features.csv");
    const std::size_t n = d.features.rows;

    // edges.tsv: one "u<TAB>v" pair per line
    {
        std::ifstream f = open_or_throw(base / "edges.tsv");
        std::set<std::pair<std::size_t, std::size_t>> canon;
        LoadInfo li;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            strip_cr(line);
            if (line.empty()) continue;
            std::istringstream ss(line);
            long long u = -1, v = -1;
            if (!(ss >> u >> v) || u < 0 || v < 0)
                throw std::runtime_error("edges.tsv: malformed line " + std::to_string(lineno));
            if (static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
                throw std::runtime_error("edges.tsv: endpoint out of range at line " +
                                         std::to_string(lineno));
            if (u == v) {
                ++li.dropped_self_loops;
                continue;
            }
            const std::size_t lo = static_cast<std::size_t>(std::min(u, v));
            const std::size_t hi = static_cast<std::size_t>(std::max(u, v));
            if (!canon.insert({lo, hi}).second) ++li.deduplicated_edges;
        }
        d.edges.assign(canon.begin(), canon.end());
        if (info) *info = li;
    }

    // labels.txt (optional)
    if (fs::exists(base / "labels.txt")) {
        std::ifstream f = open_or_throw(base / "labels.txt");
        std::string line;
        while (std::getline(f, line)) {
            strip_cr(line);
            if (line.empty()) continue;
            int v = 0;
            auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
            if (ec != std::errc())
                throw std::runtime_error("labels.txt: malformed line " +
                                         std::to_string(d.labels.size() + 1));
            d.labels.push_back(v);
        }
        if (d.labels.size() != n)
            throw std::runtime_error("labels.txt: " + std::to_string(d.labels.size()) +
                                     " labels for " + std::to_string(n) + " nodes");
    }

    // meta.json (optional)
    if (fs::exists(base / "meta.json")) {
        std::ifstream f = open_or_throw(base / "meta.json");
        nlohmann::json j;
        f >> j;
        if (j.contains("num_classes")) d.num_classes = j["num_classes"].get<int>();
        if (j.contains("name")) d.name = j["name"].get<std::string>();
    }
    if (d.num_classes == 0 && d.has_labels())
        d.num_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
    if (d.num_classes <= 0)
        throw std::runtime_error("class count unknown: provide labels.txt or meta.json");
    for (std::size_t i = 0; i < d.labels.size(); ++i)
        if (d.labels[i] < 0 || d.labels[i] >= d.num_classes)
            throw std::runtime_error("labels.txt: label " + std::to_string(d.labels[i]) +
                                     " at line " + std::to_string(i + 1) + " outside [0, " +
                                     std::to_string(d.num_classes) + ")");
    if (d.name.empty()) d.name = fs::path(dir).filename().string();
    return d;
}

void save_dataset(const GraphDataset& d, const std::string& dir) {
    const fs::path base(dir);
    fs::create_directories(base);
    {
        std::ofstream f(base / "features.csv");
        char buf[32];
        for (std::size_t i = 0; i < d.features.rows; ++i) {
            for (std::size_t j = 0; j < d.features.cols; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", d.features(i, j));
                f << (j ? "," : "") << buf;
            }
            f << '\n';
        }
    }
    {
        std::ofstream f(base / "edges.tsv");
        for (const auto& [u, v] : d.edges) f << u << '\t' << v << '\n';
    }
    if (d.has_labels()) {
        std::ofstream f(base / "labels.txt");
        for (int l : d.labels) f << l << '\n';
    }
    {
        std::ofstream f(base / "meta.json");
        nlohmann::json j{{"num_classes", d.num_classes}, {"name", d.name}};
        f << j.dump(2) << '\n';
    }
}

DatasetStats dataset_stats(const GraphDataset& d) {
    DatasetStats s;
    s.nodes = d.num_nodes();
    s.feature_dim = d.num_features();
    s.edges = d.edges.size();
    s.num_classes = d.num_classes;
    if (d.has_labels()) {
        s.class_histogram.assign(static_cast<std::size_t>(d.num_classes), 0);
        for (int l : d.labels) ++s.class_histogram[static_cast<std::size_t>(l)];
    }
    return s;
}

GraphDataset make_sbm(std::uint64_t seed, const std::vector<std::size_t>& block_sizes,
                      double p_in, double p_out, std::size_t feature_dim,
                      double feature_noise) {
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw std::invalid_argument("make_sbm: probabilities must lie in [0, 1]");
    if (block_sizes.empty()) throw std::invalid_argument("make_sbm: no blocks");

    GraphDataset d;
    d.name = "sbm";
    d.num_classes = static_cast<int>(block_sizes.size());
    std::size_t n = 0;
    for (std::size_t b = 0; b < block_sizes.size(); ++b)
        for (std::size_t i = 0; i < block_sizes[b]; ++i, ++n) d.labels.push_back(static_cast<int>(b));

    Rng edge_rng(mix_seed(seed, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = d.labels[i] == d.labels[j] ? p_in : p_out;
            if (edge_rng.bernoulli(p)) d.edges.emplace_back(i, j);
        }

    Rng feat_rng(mix_seed(seed, 1));
    const auto blocks = block_sizes.size();
    d.features = DenseMatrix(n, feature_dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < feature_dim; ++j) {
            const double indicator = (j % blocks == static_cast<std::size_t>(d.labels[i])) ? 1.0 : 0.0;
            d.features(i, j) = indicator + feature_noise * feat_rng.normal();
        }
    return d;
}

}  // namespace ccgc
