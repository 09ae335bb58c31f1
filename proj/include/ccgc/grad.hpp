#pragma once

#include "ccgc/clustering.hpp"
#include "ccgc/losses.hpp"
#include "ccgc/model.hpp"
#include "ccgc/tensor.hpp"

namespace ccgc {

// Negative term: cross-view cluster-center pairs, or every cross-view
// non-matching node pair (the plain construction used by one ablation).
enum class NegativeMode { cluster_centers, all_node_pairs };

struct LossConfig {
    double alpha = 1.0;
    PairMode pair_mode = PairMode::same_node;
    NegativeMode negative_mode = NegativeMode::cluster_centers;
    // Treat the per-view centers as constants; the negative term is then
    // reported but contributes no gradient.
    bool detach_centers = false;
};

struct Gradients {
    std::vector<DenseMatrix> w1, w2;
    std::vector<std::vector<double>> b1, b2;
};

struct BackwardResult {
    LossBreakdown loss;
    Gradients grads;
};

// Exact reverse-mode gradients of the total loss with respect to both
// encoder towers. The discrete structure (selection h, pseudo-label
// grouping) is taken from `batch` and held constant; gradients do flow
// through the center means and the row normalization. The loss value is
// computed by the same functions as the losses module.
//
// In shared-parameter mode both towers are encoder 1; grads.w2 then holds
// the view-2 tower's contribution and the caller adds it into w1.
BackwardResult backward(const EncoderParams& params, const DenseMatrix& x1,
                        const DenseMatrix& x2, const ViewPair& vp,
                        const ContrastBatch& batch, const LossConfig& cfg);

// Total loss recomputed from scratch for a parameter setting, with the
// discrete grouping frozen. This is the function the finite-difference
// checker probes; under detach_centers it returns the positive term only,
// since the detached negative term is constant for the optimizer.
double loss_on_frozen(const EncoderParams& params, const DenseMatrix& x1,
                      const DenseMatrix& x2,
                      const std::vector<std::vector<std::size_t>>& groups,
                      const LossConfig& cfg);

// Central finite differences over every parameter against backward().
// Returns the max relative error |g_a - g_f| / max(1, |g_a|, |g_f|).
double finite_diff_check(const EncoderParams& params, const DenseMatrix& x1,
                         const DenseMatrix& x2,
                         const std::vector<std::vector<std::size_t>>& groups,
                         const LossConfig& cfg, double epsilon);

}  // namespace ccgc
