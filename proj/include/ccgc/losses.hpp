#pragma once

#include <string>

#include "ccgc/clustering.hpp"
#include "ccgc/tensor.hpp"

namespace ccgc {

// same_node pairs each selected node with itself across views; full_intra
// additionally pairs every cross-view couple inside a cluster.
enum class PairMode { same_node, full_intra_cluster };

PairMode pair_mode_from_string(const std::string& s);
std::string to_string(PairMode m);

struct LossBreakdown {
    double l_pos = 0.0;
    double l_neg = 0.0;
    double alpha = 0.0;
    double total = 0.0;
};

// (1/K) sum over clusters of squared distances between paired cross-view
// rows. Rows are expected unit-norm or zero.
double positive_loss(const DenseMatrix& e1, const DenseMatrix& e2,
                     const ContrastBatch& b, PairMode mode = PairMode::same_node);

// Mean cosine similarity over cross-view center pairs with p != q.
double negative_loss(const ContrastBatch& b);

// Mean cosine over all cross-view non-matching node pairs; the plain
// negative construction used by the ablation that disables center negatives.
double negative_loss_all_pairs(const DenseMatrix& e1, const DenseMatrix& e2);

LossBreakdown total_loss(double l_pos, double l_neg, double alpha);

}  // namespace ccgc
