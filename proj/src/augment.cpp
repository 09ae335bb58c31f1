#include "ccgc/augment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ccgc/rng.hpp"
#include "ccgc/smoothing.hpp"

namespace ccgc {

MaskMode mask_mode_from_string(const std::string& s) {
    if (s == "column") return MaskMode::column;
    if (s == "entry") return MaskMode::entry;
    throw std::invalid_argument("unknown mask mode: " + s);
}

namespace {

void check_rate(double rate) {
    if (rate < 0.0 || rate > 1.0)
        throw std::invalid_argument("augmentation rate must lie in [0, 1]");
}

}  // namespace

GraphDataset drop_edges(const GraphDataset& d, double rate, std::uint64_t seed) {
    check_rate(rate);
    GraphDataset out = d;
    out.edges.clear();
    Rng rng(seed);
    for (const auto& e : d.edges)
        if (!rng.bernoulli(rate)) out.edges.push_back(e);
    return out;
}

GraphDataset add_edges(const GraphDataset& d, double rate, std::uint64_t seed) {
    check_rate(rate);
    GraphDataset out = d;
    if (rate == 0.0 || d.edges.empty()) return out;

    const std::size_t n = d.num_nodes();
    const std::size_t all_pairs = n * (n - 1) / 2;
    const std::size_t absent = all_pairs - d.edges.size();
    const std::size_t needed =
        static_cast<std::size_t>(std::ceil(rate * static_cast<double>(d.edges.size()) - 1e-9));
    if (absent == 0)
        throw std::invalid_argument("add_edges: graph is already complete");
    if (needed > absent)
        throw std::invalid_argument("add_edges: fewer absent pairs than requested edges");

    std::set<std::pair<std::size_t, std::size_t>> existing(d.edges.begin(), d.edges.end());
    Rng rng(seed);

    if (absent <= 4 * needed || absent <= (1u << 20)) {
        // Dense case: enumerate absent pairs and sample without replacement.
        std::vector<std::pair<std::size_t, std::size_t>> pool;
        pool.reserve(absent);
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = u + 1; v < n; ++v)
                if (!existing.contains({u, v})) pool.emplace_back(u, v);
        for (std::size_t i = 0; i < needed; ++i) {
            const std::size_t j = i + rng.index(pool.size() - i);
            std::swap(pool[i], pool[j]);
            existing.insert(pool[i]);
        }
    } else {
        // Sparse case: rejection sampling terminates quickly.
        std::size_t added = 0;
        while (added < needed) {
            std::size_t u = rng.index(n), v = rng.index(n);
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            if (existing.insert({u, v}).second) ++added;
        }
    }
    out.edges.assign(existing.begin(), existing.end());
    return out;
}

GraphDataset mask_features(const GraphDataset& d, double rate, std::uint64_t seed,
                           MaskMode mode) {
    check_rate(rate);
    GraphDataset out = d;
    Rng rng(seed);
    if (mode == MaskMode::column) {
        for (std::size_t j = 0; j < d.features.cols; ++j)
            if (rng.bernoulli(rate))
                for (std::size_t i = 0; i < d.features.rows; ++i) out.features(i, j) = 0.0;
    } else {
        for (double& x : out.features.data)
            if (rng.bernoulli(rate)) x = 0.0;
    }
    return out;
}

namespace {

// Gauss-Jordan inverse with partial pivoting.
DenseMatrix invert(DenseMatrix m) {
    const std::size_t n = m.rows;
    DenseMatrix inv = DenseMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (m(piv, col) == 0.0) throw std::runtime_error("diffusion: singular system");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const double scale = 1.0 / m(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            m(col, j) *= scale;
            inv(col, j) *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m(r, j) -= f * m(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

}  // namespace

DiffusionResult diffusion(const GraphDataset& d, double teleport,
                          std::size_t max_exact_dim) {
    if (teleport <= 0.0 || teleport > 1.0)
        throw std::invalid_argument("diffusion: teleport must lie in (0, 1]");
    const std::size_t n = d.num_nodes();

    DiffusionResult r;
    if (n <= max_exact_dim) {
        const SparseSymMatrix a_sym = build_operator(d, 1).matrix;
        DenseMatrix m = DenseMatrix::identity(n);
        for (const auto& e : a_sym.entries) m(e.row, e.col) -= (1.0 - teleport) * e.value;
        r.matrix = invert(std::move(m));
        for (double& x : r.matrix.data) x *= teleport;
        r.exact = true;
    } else {
        constexpr std::size_t kTerms = 64;
        r.matrix = diffusion_series(d, teleport, kTerms);
        r.exact = false;
        // |S - S_k| <= (1-t)^(k+1) / t in operator norm for the geometric tail
        r.tail_bound =
            std::pow(1.0 - teleport, static_cast<double>(kTerms + 1)) / teleport;
    }
    return r;
}

DenseMatrix diffusion_series(const GraphDataset& d, double teleport, std::size_t terms) {
    if (teleport <= 0.0 || teleport > 1.0)
        throw std::invalid_argument("diffusion: teleport must lie in (0, 1]");
    const std::size_t n = d.num_nodes();
    const SparseSymMatrix a_sym = build_operator(d, 1).matrix;

    // teleport * sum_k ((1-teleport) A_sym)^k
    DenseMatrix power = DenseMatrix::identity(n);
    DenseMatrix sum = power;
    for (std::size_t k = 1; k <= terms; ++k) {
        power = spmm(a_sym, power);
        const double w = std::pow(1.0 - teleport, static_cast<double>(k));
        for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += w * power.data[i];
    }
    for (double& x : sum.data) x *= teleport;
    return sum;
}

}  // namespace ccgc
