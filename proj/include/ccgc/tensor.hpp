#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccgc {

// Row-major dense matrix of 64-bit floats.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }

    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

    static DenseMatrix identity(std::size_t n);
};

// Symmetric sparse matrix. Both (i,j) and (j,i) are stored explicitly;
// entries are sorted by (row, col) and row_ptr indexes the start of each row,
// so every row scan runs in a fixed ascending-column order.
struct SparseSymMatrix {
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    std::size_t dim = 0;
    std::vector<Entry> entries;
    std::vector<std::size_t> row_ptr;

    // Builds the canonical form from arbitrary triplets. Each undirected pair
    // may be given once or mirrored; conflicting duplicates are an error.
    static SparseSymMatrix from_triplets(std::size_t dim, const std::vector<Entry>& triplets);

    DenseMatrix densify() const;
    std::size_t nnz() const { return entries.size(); }
};

// All kernels below use a fixed left-to-right accumulation order per output
// element. The OpenMP versions partition whole output rows across threads,
// so results are bit-identical to the serial reference for any thread count.

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm(const SparseSymMatrix& s, const DenseMatrix& m);
DenseMatrix row_l2_normalize(const DenseMatrix& m);
DenseMatrix transpose(const DenseMatrix& m);

double dot(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> v);

// <u,v> / (|u||v|); 0 if either vector is zero.
double cosine(std::span<const double> u, std::span<const double> v);

// Serial reference kernels kept for the bit-identity tests and the benchmark.
namespace ref {
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm(const SparseSymMatrix& s, const DenseMatrix& m);
DenseMatrix row_l2_normalize(const DenseMatrix& m);
}  // namespace ref

}  // namespace ccgc
