#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ccgc/grad.hpp"
#include "ccgc/model.hpp"

namespace ccgc {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // additive L2 term, 0 disables
    double grad_clip = 0.0;     // global-norm clip, 0 disables
};

// One bias-corrected Adam update of a flat parameter array; t is the
// 1-based step count after this update.
void adam_update(std::span<double> p, std::span<const double> g, std::vector<double>& m,
                 std::vector<double>& v, std::size_t t, const AdamConfig& cfg);

// Moment buffers for a full EncoderParams set.
class Adam {
public:
    Adam(const EncoderParams& shape, AdamConfig cfg);

    // Applies one step. In shared-parameter mode the view-2 tower gradients
    // are folded into encoder 1 and encoder 2 is kept identical to it.
    void step(EncoderParams& params, const Gradients& grads);

    std::size_t steps() const { return t_; }

private:
    AdamConfig cfg_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;  // one pair per parameter tensor
};

}  // namespace ccgc
