#include "ccgc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ccgc/rng.hpp"

namespace ccgc {

DenseMatrix fuse_views(const ViewPair& vp) {
    if (!vp.e1.same_shape(vp.e2))
        throw std::invalid_argument("fuse_views: view shapes differ");
    DenseMatrix e(vp.e1.rows, vp.e1.cols);
    for (std::size_t i = 0; i < e.data.size(); ++i)
        e.data[i] = 0.5 * (vp.e1.data[i] + vp.e2.data[i]);
    return e;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

// D^2-weighted seeding; falls back to a uniform draw when all remaining
// points coincide with chosen centers.
DenseMatrix kmeanspp_seed(const DenseMatrix& e, std::size_t k, Rng& rng) {
    const std::size_t n = e.rows, d = e.cols;
    DenseMatrix centers(k, d);
    std::vector<double> dist2(n, std::numeric_limits<double>::max());

    std::size_t first = rng.index(n);
    std::copy_n(e.row(first), d, centers.row(0));

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cur = sq_dist(e.row(i), centers.row(c - 1), d);
            if (cur < dist2[i]) dist2[i] = cur;
            total += dist2[i];
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.index(n);
        } else {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        std::copy_n(e.row(pick), d, centers.row(c));
    }
    return centers;
}

// Nearest center per point, ties to the lower center index.
void assign_points(const DenseMatrix& e, const DenseMatrix& centers,
                   std::vector<int>& assign) {
    const std::int64_t n = static_cast<std::int64_t>(e.rows);
    const std::size_t k = centers.rows, d = e.cols;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* row = e.row(static_cast<std::size_t>(i));
        double best = std::numeric_limits<double>::max();
        int best_c = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double dd = sq_dist(row, centers.row(c), d);
            if (dd < best) {
                best = dd;
                best_c = static_cast<int>(c);
            }
        }
        assign[static_cast<std::size_t>(i)] = best_c;
    }
}

// Moves the globally farthest point of a cluster that can spare one into
// each empty cluster; the moved point becomes the cluster's center.
void repair_empty_clusters(const DenseMatrix& e, DenseMatrix& centers,
                           std::vector<int>& assign, std::vector<std::size_t>& counts) {
    const std::size_t n = e.rows, d = e.cols;
    counts.assign(centers.rows, 0);
    for (int a : assign) ++counts[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < centers.rows; ++c) {
        if (counts[c] > 0) continue;
        double worst = -1.0;
        std::size_t worst_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = static_cast<std::size_t>(assign[i]);
            if (counts[a] < 2) continue;
            const double dd = sq_dist(e.row(i), centers.row(a), d);
            if (dd > worst) {
                worst = dd;
                worst_i = i;
            }
        }
        --counts[static_cast<std::size_t>(assign[worst_i])];
        assign[worst_i] = static_cast<int>(c);
        ++counts[c];
        std::copy_n(e.row(worst_i), d, centers.row(c));
    }
}

double total_inertia(const DenseMatrix& e, const DenseMatrix& centers,
                     const std::vector<int>& assign) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < e.rows; ++i)
        inertia += sq_dist(e.row(i), centers.row(static_cast<std::size_t>(assign[i])), e.cols);
    return inertia;
}

}  // namespace

KmeansResult kmeans(const DenseMatrix& e, int k, std::uint64_t seed,
                    std::size_t max_iter, double tol) {
    const std::size_t n = e.rows, d = e.cols;
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("kmeans: k must lie in [1, N]");
    const std::size_t ku = static_cast<std::size_t>(k);

    Rng rng(seed);
    KmeansResult r;
    r.centers = kmeanspp_seed(e, ku, rng);
    r.assignments.assign(n, 0);

    std::vector<std::size_t> counts(ku);
    double prev_inertia = std::numeric_limits<double>::max();
    auto record = [&](double inertia) {
        if (inertia > prev_inertia + 1e-9 * std::max(1.0, prev_inertia))
            throw std::runtime_error("kmeans: inertia increased");
        r.inertia_trace.push_back(inertia);
        prev_inertia = inertia;
    };

    for (std::size_t it = 0; it < max_iter; ++it) {
        assign_points(e, r.centers, r.assignments);
        repair_empty_clusters(e, r.centers, r.assignments, counts);
        record(total_inertia(e, r.centers, r.assignments));

        DenseMatrix next(ku, d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = static_cast<std::size_t>(r.assignments[i]);
            const double* row = e.row(i);
            double* crow = next.row(a);
            for (std::size_t j = 0; j < d; ++j) crow[j] += row[j];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < ku; ++c) {
            double* crow = next.row(c);
            const double cnt = static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < d; ++j) crow[j] /= cnt;
            shift = std::max(shift, std::sqrt(sq_dist(crow, r.centers.row(c), d)));
        }
        r.centers = std::move(next);
        r.iterations = it + 1;
        if (shift < tol) break;
    }

    assign_points(e, r.centers, r.assignments);
    repair_empty_clusters(e, r.centers, r.assignments, counts);
    r.inertia = total_inertia(e, r.centers, r.assignments);
    record(r.inertia);
    return r;
}

std::vector<double> confidence_scores(const DenseMatrix& e, const KmeansResult& km) {
    std::vector<double> scores(e.rows);
    for (std::size_t i = 0; i < e.rows; ++i) {
        const std::size_t a = static_cast<std::size_t>(km.assignments[i]);
        scores[i] = std::exp(-sq_dist(e.row(i), km.centers.row(a), e.cols));
    }
    return scores;
}

std::vector<std::size_t> select_high_confidence(const std::vector<double>& scores,
                                                const std::vector<int>& assignments,
                                                int k, double tau) {
    if (tau <= 0.0 || tau > 1.0)
        throw std::invalid_argument("select_high_confidence: tau must lie in (0, 1]");
    const std::size_t n = scores.size();
    // Guard against products like 0.7*10 landing one ulp above an integer.
    std::size_t m = static_cast<std::size_t>(
        std::ceil(tau * static_cast<double>(n) - 1e-9));
    m = std::clamp<std::size_t>(m, 1, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });

    std::vector<char> picked(n, 0);
    for (std::size_t r = 0; r < m; ++r) picked[order[r]] = 1;

    // Every cluster keeps at least its most confident member.
    std::vector<std::size_t> best(static_cast<std::size_t>(k), n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = static_cast<std::size_t>(assignments[order[r]]);
        if (best[c] == n) best[c] = order[r];
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        if (best[c] == n) continue;  // cluster has no members at all
        bool covered = false;
        for (std::size_t i = 0; i < n && !covered; ++i)
            covered = picked[i] && assignments[i] == static_cast<int>(c);
        if (!covered) picked[best[c]] = 1;
    }

    std::vector<std::size_t> h;
    for (std::size_t i = 0; i < n; ++i)
        if (picked[i]) h.push_back(i);
    return h;
}

ClusterState make_cluster_state(const DenseMatrix& fused, int k, std::uint64_t seed,
                                double tau, std::size_t max_iter, double tol) {
    ClusterState st;
    st.tau = tau;
    st.km = kmeans(fused, k, seed, max_iter, tol);
    if (tau >= 1.0) {
        // Stage-1 / tau=1 path: everything is selected, confidence is never consulted.
        st.high_conf.resize(fused.rows);
        std::iota(st.high_conf.begin(), st.high_conf.end(), 0);
    } else {
        st.confidence = confidence_scores(fused, st.km);
        st.high_conf = select_high_confidence(st.confidence, st.km.assignments, k, tau);
    }
    return st;
}

std::size_t ContrastBatch::selected() const {
    std::size_t s = 0;
    for (const auto& c : cluster_nodes) s += c.size();
    return s;
}

ContrastBatch batch_from_groups(const ViewPair& vp,
                                const std::vector<std::vector<std::size_t>>& groups) {
    ContrastBatch b;
    b.k = static_cast<int>(groups.size());
    b.cluster_nodes = groups;
    const std::size_t d = vp.e1.cols;
    b.cen1 = DenseMatrix(groups.size(), d, 0.0);
    b.cen2 = DenseMatrix(groups.size(), d, 0.0);
    for (std::size_t p = 0; p < groups.size(); ++p) {
        if (groups[p].empty())
            throw std::runtime_error("contrast batch: cluster without members");
        double* c1 = b.cen1.row(p);
        double* c2 = b.cen2.row(p);
        for (std::size_t i : groups[p]) {
            const double* r1 = vp.e1.row(i);
            const double* r2 = vp.e2.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                c1[j] += r1[j];
                c2[j] += r2[j];
            }
        }
        const double inv = 1.0 / static_cast<double>(groups[p].size());
        for (std::size_t j = 0; j < d; ++j) {
            c1[j] *= inv;
            c2[j] *= inv;
        }
    }
    return b;
}

ContrastBatch build_contrast_batch(const ViewPair& vp, const ClusterState& st) {
    if (st.high_conf.empty())
        throw std::invalid_argument("build_contrast_batch: empty selection");
    const std::size_t k = st.km.centers.rows;
    std::vector<std::vector<std::size_t>> groups(k);
    for (std::size_t i : st.high_conf)
        groups[static_cast<std::size_t>(st.km.assignments[i])].push_back(i);
    return batch_from_groups(vp, groups);
}

}  // namespace ccgc
