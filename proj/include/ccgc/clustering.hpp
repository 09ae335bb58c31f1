#pragma once

#include <cstdint>
#include <vector>

#include "ccgc/model.hpp"
#include "ccgc/tensor.hpp"

namespace ccgc {

// Elementwise mean of the two views.
DenseMatrix fuse_views(const ViewPair& vp);

struct KmeansResult {
    std::vector<int> assignments;
    DenseMatrix centers;                // k x d
    double inertia = 0.0;
    std::vector<double> inertia_trace;  // one value per Lloyd iteration
    std::size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Empty clusters are repaired by
// moving the point farthest from its center. Deterministic for a fixed seed.
KmeansResult kmeans(const DenseMatrix& e, int k, std::uint64_t seed,
                    std::size_t max_iter = 300, double tol = 1e-6);

// exp(-squared distance to own center), in (0, 1].
std::vector<double> confidence_scores(const DenseMatrix& e, const KmeansResult& km);

// Indices of the ceil(tau*N) highest scores (ties to the lower index),
// force-including the best member of any cluster the cut would empty.
// Returned sorted ascending.
std::vector<std::size_t> select_high_confidence(const std::vector<double>& scores,
                                                const std::vector<int>& assignments,
                                                int k, double tau);

struct ClusterState {
    KmeansResult km;
    std::vector<double> confidence;
    std::vector<std::size_t> high_conf;  // sorted ascending
    double tau = 1.0;
};

ClusterState make_cluster_state(const DenseMatrix& fused, int k, std::uint64_t seed,
                                double tau, std::size_t max_iter = 300, double tol = 1e-6);

// High-confidence rows grouped by pseudo-label. Blocks are index lists into
// the view matrices, so row i of a cluster names the same node in both views.
struct ContrastBatch {
    int k = 0;
    std::vector<std::vector<std::size_t>> cluster_nodes;  // per cluster, ascending
    DenseMatrix cen1, cen2;                               // per-view block means, k x d
    std::size_t selected() const;
};

ContrastBatch build_contrast_batch(const ViewPair& vp, const ClusterState& st);

// Grouping only; centers are filled from a ViewPair. Used by the gradient
// checker to freeze the discrete structure while parameters move.
ContrastBatch batch_from_groups(const ViewPair& vp,
                                const std::vector<std::vector<std::size_t>>& groups);

}  // namespace ccgc
