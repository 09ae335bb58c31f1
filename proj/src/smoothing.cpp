#include "ccgc/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace ccgc {

PropagationOperator build_operator(const GraphDataset& d, std::size_t layers) {
    const std::size_t n = d.num_nodes();
    std::vector<double> degree(n, 1.0);  // self-loop contributes 1 to every node
    for (const auto& [u, v] : d.edges) {
        degree[u] += 1.0;
        degree[v] += 1.0;
    }

    // 1/sqrt(du*dv) keeps entries exact for integer-degree products
    std::vector<SparseSymMatrix::Entry> triplets;
    triplets.reserve(n + d.edges.size());
    for (std::size_t i = 0; i < n; ++i) triplets.push_back({i, i, 1.0 / degree[i]});
    for (const auto& [u, v] : d.edges)
        triplets.push_back({u, v, 1.0 / std::sqrt(degree[u] * degree[v])});

    PropagationOperator op;
    op.matrix = SparseSymMatrix::from_triplets(n, triplets);
    op.layers = layers;
    return op;
}

DenseMatrix smooth(const PropagationOperator& op, const DenseMatrix& x) {
    if (op.matrix.dim != x.rows)
        throw std::invalid_argument("smooth: operator dim does not match rows");
    DenseMatrix out = x;
    for (std::size_t t = 0; t < op.layers; ++t) out = spmm(op.matrix, out);
    return out;
}

}  // namespace ccgc
