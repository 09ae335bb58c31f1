#include "ccgc/losses.hpp"

#include <stdexcept>

namespace ccgc {

PairMode pair_mode_from_string(const std::string& s) {
    if (s == "same-node" || s == "eq9") return PairMode::same_node;
    if (s == "full-intra-cluster") return PairMode::full_intra_cluster;
    throw std::invalid_argument("unknown pair mode: " + s);
}

std::string to_string(PairMode m) {
    return m == PairMode::same_node ? "same-node" : "full-intra-cluster";
}

namespace {

double row_sq_dist(const DenseMatrix& a, std::size_t i, const DenseMatrix& b,
                   std::size_t j) {
    double s = 0.0;
    const double* ra = a.row(i);
    const double* rb = b.row(j);
    for (std::size_t c = 0; c < a.cols; ++c) {
        const double t = ra[c] - rb[c];
        s += t * t;
    }
    return s;
}

}  // namespace

double positive_loss(const DenseMatrix& e1, const DenseMatrix& e2,
                     const ContrastBatch& b, PairMode mode) {
    if (!e1.same_shape(e2))
        throw std::invalid_argument("positive_loss: view shapes differ");
    for (const auto& cluster : b.cluster_nodes)
        for (std::size_t i : cluster)
            if (i >= e1.rows) throw std::invalid_argument("positive_loss: index out of range");

    double sum = 0.0;
    for (const auto& cluster : b.cluster_nodes) {
        if (mode == PairMode::same_node) {
            for (std::size_t i : cluster) sum += row_sq_dist(e1, i, e2, i);
        } else {
            for (std::size_t i : cluster)
                for (std::size_t j : cluster) sum += row_sq_dist(e1, i, e2, j);
        }
    }
    return sum / static_cast<double>(b.k);
}

double negative_loss(const ContrastBatch& b) {
    const std::size_t k = b.cen1.rows;
    if (k < 2)
        throw std::invalid_argument("negative_loss: needs at least two clusters");
    double sum = 0.0;
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = 0; q < k; ++q) {
            if (p == q) continue;
            sum += cosine(b.cen1.row_span(p), b.cen2.row_span(q));
        }
    return sum / static_cast<double>(k * k - k);
}

double negative_loss_all_pairs(const DenseMatrix& e1, const DenseMatrix& e2) {
    if (!e1.same_shape(e2))
        throw std::invalid_argument("negative_loss_all_pairs: view shapes differ");
    const std::size_t n = e1.rows;
    if (n < 2)
        throw std::invalid_argument("negative_loss_all_pairs: needs at least two rows");

    // Rows are unit or zero, so cosine reduces to the dot product and the
    // pair sum collapses to <sum e1, sum e2> minus the matched diagonal.
    std::vector<double> s1(e1.cols, 0.0), s2(e1.cols, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r1 = e1.row(i);
        const double* r2 = e2.row(i);
        for (std::size_t j = 0; j < e1.cols; ++j) {
            s1[j] += r1[j];
            s2[j] += r2[j];
        }
    }
    double total = dot(s1, s2);
    for (std::size_t i = 0; i < n; ++i) total -= dot(e1.row_span(i), e2.row_span(i));
    return total / static_cast<double>(n * n - n);
}

LossBreakdown total_loss(double l_pos, double l_neg, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("total_loss: alpha must be >= 0");
    return {l_pos, l_neg, alpha, l_pos + alpha * l_neg};
}

}  // namespace ccgc
