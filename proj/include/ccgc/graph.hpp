#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccgc/tensor.hpp"

namespace ccgc {

// An attributed undirected graph. Edges are canonical: each undirected edge
// is stored exactly once as (u, v) with u < v, sorted; no self-loops.
struct GraphDataset {
    std::string name;
    DenseMatrix features;                                    // N x D
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // canonical
    std::vector<int> labels;                                 // empty when unlabeled
    int num_classes = 0;                                     // K

    std::size_t num_nodes() const { return features.rows; }
    std::size_t num_features() const { return features.cols; }
    bool has_labels() const { return !labels.empty(); }
};

struct LoadInfo {
    std::size_t dropped_self_loops = 0;
    std::size_t deduplicated_edges = 0;
};

// Reads a bundle directory: features.csv (required), edges.tsv (required),
// labels.txt (optional), meta.json (optional {"num_classes": K, "name": s}).
GraphDataset load_dataset(const std::string& dir, LoadInfo* info = nullptr);

void save_dataset(const GraphDataset& d, const std::string& dir);

struct DatasetStats {
    std::size_t nodes = 0;
    std::size_t feature_dim = 0;
    std::size_t edges = 0;
    int num_classes = 0;
    std::vector<std::size_t> class_histogram;  // empty when unlabeled
};

DatasetStats dataset_stats(const GraphDataset& d);

// Planted-partition graph with block-indicator features plus Gaussian noise;
// labels are block ids. Feature j of a block-b node is 1 when j % blocks == b.
GraphDataset make_sbm(std::uint64_t seed, const std::vector<std::size_t>& block_sizes,
                      double p_in, double p_out, std::size_t feature_dim,
                      double feature_noise);

}  // namespace ccgc
