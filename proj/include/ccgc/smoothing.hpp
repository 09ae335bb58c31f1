#pragma once

#include "ccgc/graph.hpp"
#include "ccgc/tensor.hpp"

namespace ccgc {

// Symmetrically normalized adjacency with self-loops added before
// normalization, applied `layers` times as a low-pass attribute filter.
struct PropagationOperator {
    SparseSymMatrix matrix;
    std::size_t layers = 0;
};

PropagationOperator build_operator(const GraphDataset& d, std::size_t layers);

// Applies the operator `layers` times; layers == 0 returns x unchanged.
DenseMatrix smooth(const PropagationOperator& op, const DenseMatrix& x);

}  // namespace ccgc
