#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccgc/tensor.hpp"

namespace ccgc {

enum class Activation { linear, relu, tanh };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Two MLP encoders of identical architecture with independent weights.
// When `shared` is set (augmentation ablations) view 2 reuses encoder 1.
struct EncoderParams {
    std::vector<DenseMatrix> w1, w2;               // one matrix per layer
    std::vector<std::vector<double>> b1, b2;       // empty when bias disabled
    Activation activation = Activation::linear;
    bool shared = false;

    std::size_t layer_count() const { return w1.size(); }
    bool has_bias() const { return !b1.empty(); }
};

// Xavier-uniform init. Encoder 1 draws from sub-seed seed*2, encoder 2 from
// seed*2+1, so the two towers start from different weights.
EncoderParams init_params(std::uint64_t seed, std::size_t d_in,
                          const std::vector<std::size_t>& hidden_dims,
                          Activation activation, bool bias);

// Per-view intermediates retained for the backward pass.
struct ForwardTrace {
    std::vector<DenseMatrix> pre;   // pre[l] = input_l * W_l (+ b_l)
    std::vector<DenseMatrix> post;  // post[l] = act(pre[l])
    std::vector<double> row_norm;   // l2 norm of each final post row
};

struct ViewPair {
    DenseMatrix e1, e2;  // row-normalized embeddings
    ForwardTrace t1, t2;
};

// x2 may differ from x1 (augmentation ablations feed the second view a
// different smoothed input); the plain method passes the same matrix twice.
ViewPair forward(const EncoderParams& p, const DenseMatrix& x1, const DenseMatrix& x2);

inline ViewPair forward(const EncoderParams& p, const DenseMatrix& x) {
    return forward(p, x, x);
}

}  // namespace ccgc
