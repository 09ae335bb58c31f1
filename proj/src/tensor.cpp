#include "ccgc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace ccgc {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t dim,
                                               const std::vector<Entry>& triplets) {
    // Collapse to the upper triangle first so mirrored inputs are accepted.
    std::map<std::pair<std::size_t, std::size_t>, double> upper;
    for (const auto& t : triplets) {
        if (t.row >= dim || t.col >= dim)
            throw std::invalid_argument("sparse entry index out of range");
        if (!std::isfinite(t.value))
            throw std::invalid_argument("sparse entry value not finite");
        const std::pair<std::size_t, std::size_t> key{std::min(t.row, t.col),
                                                      std::max(t.row, t.col)};
        auto [it, inserted] = upper.emplace(key, t.value);
        if (!inserted && it->second != t.value)
            throw std::invalid_argument("conflicting duplicate sparse entry");
    }

    SparseSymMatrix s;
    s.dim = dim;
    s.entries.reserve(2 * upper.size());
    for (const auto& [key, v] : upper) {
        s.entries.push_back({key.first, key.second, v});
        if (key.first != key.second) s.entries.push_back({key.second, key.first, v});
    }
    std::sort(s.entries.begin(), s.entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    s.row_ptr.assign(dim + 1, 0);
    for (const auto& e : s.entries) ++s.row_ptr[e.row + 1];
    for (std::size_t i = 0; i < dim; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    return s;
}

DenseMatrix SparseSymMatrix::densify() const {
    DenseMatrix m(dim, dim, 0.0);
    for (const auto& e : entries) m(e.row, e.col) = e.value;
    return m;
}

namespace {

void check_matmul_shapes(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: inner dimensions differ (" +
                                    std::to_string(a.cols) + " vs " +
                                    std::to_string(b.rows) + ")");
}

void check_spmm_shapes(const SparseSymMatrix& s, const DenseMatrix& m) {
    if (s.dim != m.rows)
        throw std::invalid_argument("spmm: operator dim " + std::to_string(s.dim) +
                                    " does not match matrix rows " + std::to_string(m.rows));
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    check_matmul_shapes(a, b);
    DenseMatrix c(a.rows, b.cols, 0.0);
    const std::int64_t n = static_cast<std::int64_t>(a.rows);
    const std::size_t kk = a.cols, jj = b.cols;
    const std::size_t kb = 256;  // k-tile keeps a slab of b hot across a row block

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* arow = a.row(static_cast<std::size_t>(i));
        double* crow = c.row(static_cast<std::size_t>(i));
        for (std::size_t k0 = 0; k0 < kk; k0 += kb) {
            const std::size_t k1 = std::min(k0 + kb, kk);
            for (std::size_t k = k0; k < k1; ++k) {
                const double aik = arow[k];
                const double* brow = b.row(k);
                for (std::size_t j = 0; j < jj; ++j) crow[j] += aik * brow[j];
            }
        }
    }
    return c;
}

DenseMatrix spmm(const SparseSymMatrix& s, const DenseMatrix& m) {
    check_spmm_shapes(s, m);
    DenseMatrix out(s.dim, m.cols, 0.0);
    const std::int64_t n = static_cast<std::int64_t>(s.dim);
    const std::size_t jj = m.cols;

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double* orow = out.row(static_cast<std::size_t>(i));
        for (std::size_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
            const double v = s.entries[e].value;
            const double* mrow = m.row(s.entries[e].col);
            for (std::size_t j = 0; j < jj; ++j) orow[j] += v * mrow[j];
        }
    }
    return out;
}

DenseMatrix row_l2_normalize(const DenseMatrix& m) {
    DenseMatrix out(m.rows, m.cols);
    const std::int64_t n = static_cast<std::int64_t>(m.rows);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* src = m.row(static_cast<std::size_t>(i));
        double* dst = out.row(static_cast<std::size_t>(i));
        double sq = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) sq += src[j] * src[j];
        if (sq == 0.0) {
            for (std::size_t j = 0; j < m.cols; ++j) dst[j] = 0.0;  // zero rows stay zero
        } else {
            const double inv = 1.0 / std::sqrt(sq);
            for (std::size_t j = 0; j < m.cols; ++j) dst[j] = src[j] * inv;
        }
    }
    return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

double dot(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double l2_norm(std::span<const double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    return std::sqrt(sq);
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: length mismatch");
    const double nu = l2_norm(u), nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot(u, v) / (nu * nv);
}

namespace ref {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    check_matmul_shapes(a, b);
    DenseMatrix c(a.rows, b.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

DenseMatrix spmm(const SparseSymMatrix& s, const DenseMatrix& m) {
    check_spmm_shapes(s, m);
    DenseMatrix out(s.dim, m.cols, 0.0);
    for (std::size_t i = 0; i < s.dim; ++i) {
        double* orow = out.row(i);
        for (std::size_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
            const double v = s.entries[e].value;
            const double* mrow = m.row(s.entries[e].col);
            for (std::size_t j = 0; j < m.cols; ++j) orow[j] += v * mrow[j];
        }
    }
    return out;
}

DenseMatrix row_l2_normalize(const DenseMatrix& m) {
    DenseMatrix out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* src = m.row(i);
        double* dst = out.row(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) sq += src[j] * src[j];
        if (sq == 0.0) {
            for (std::size_t j = 0; j < m.cols; ++j) dst[j] = 0.0;
        } else {
            const double inv = 1.0 / std::sqrt(sq);
            for (std::size_t j = 0; j < m.cols; ++j) dst[j] = src[j] * inv;
        }
    }
    return out;
}

}  // namespace ref

}  // namespace ccgc
