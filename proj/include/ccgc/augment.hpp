#pragma once

#include <cstdint>
#include <string>

#include "ccgc/graph.hpp"
#include "ccgc/tensor.hpp"

namespace ccgc {

enum class MaskMode { column, entry };

MaskMode mask_mode_from_string(const std::string& s);

// Removes each canonical undirected edge independently with probability rate.
GraphDataset drop_edges(const GraphDataset& d, double rate, std::uint64_t seed);

// Adds ceil(rate * |E|) distinct absent non-self-loop edges, uniformly.
GraphDataset add_edges(const GraphDataset& d, double rate, std::uint64_t seed);

// Zeroes feature columns (or entries) independently with probability rate.
GraphDataset mask_features(const GraphDataset& d, double rate, std::uint64_t seed,
                           MaskMode mode = MaskMode::column);

struct DiffusionResult {
    DenseMatrix matrix;      // teleport * (I - (1-teleport) * A_sym)^-1
    bool exact = true;       // false when the truncated series was used
    double tail_bound = 0.0; // geometric tail estimate for the series path
};

// Personalized-PageRank diffusion over the renormalized symmetric adjacency.
// Dense inversion up to max_exact_dim nodes; truncated power series beyond.
DiffusionResult diffusion(const GraphDataset& d, double teleport,
                          std::size_t max_exact_dim = 10000);

// Truncated series evaluation, exposed for the oracle cross-check.
DenseMatrix diffusion_series(const GraphDataset& d, double teleport, std::size_t terms);

}  // namespace ccgc
