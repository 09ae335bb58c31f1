#include "ccgc/model.hpp"

#include <cmath>
#include <stdexcept>

#include "ccgc/rng.hpp"

namespace ccgc {

Activation activation_from_string(const std::string& s) {
    if (s == "linear") return Activation::linear;
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
    }
    return "linear";
}

namespace {

std::vector<DenseMatrix> init_tower(std::uint64_t sub_seed, std::size_t d_in,
                                    const std::vector<std::size_t>& dims) {
    Rng rng(sub_seed);
    std::vector<DenseMatrix> ws;
    std::size_t fan_in = d_in;
    for (std::size_t d_out : dims) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + d_out));
        DenseMatrix w(fan_in, d_out);
        for (double& x : w.data) x = rng.uniform(-bound, bound);
        ws.push_back(std::move(w));
        fan_in = d_out;
    }
    return ws;
}

void apply_activation(Activation a, const DenseMatrix& pre, DenseMatrix& post) {
    post = pre;
    switch (a) {
        case Activation::linear:
            break;
        case Activation::relu:
            for (double& x : post.data) x = x > 0.0 ? x : 0.0;
            break;
        case Activation::tanh:
            for (double& x : post.data) x = std::tanh(x);
            break;
    }
}

ForwardTrace run_tower(const std::vector<DenseMatrix>& ws,
                       const std::vector<std::vector<double>>& bs, Activation act,
                       const DenseMatrix& x) {
    ForwardTrace t;
    const DenseMatrix* input = &x;
    for (std::size_t l = 0; l < ws.size(); ++l) {
        DenseMatrix pre = matmul(*input, ws[l]);
        if (!bs.empty()) {
            const auto& b = bs[l];
            for (std::size_t i = 0; i < pre.rows; ++i) {
                double* row = pre.row(i);
                for (std::size_t j = 0; j < pre.cols; ++j) row[j] += b[j];
            }
        }
        DenseMatrix post;
        apply_activation(act, pre, post);
        t.pre.push_back(std::move(pre));
        t.post.push_back(std::move(post));
        input = &t.post.back();
    }
    const DenseMatrix& last = t.post.back();
    t.row_norm.resize(last.rows);
    for (std::size_t i = 0; i < last.rows; ++i) t.row_norm[i] = l2_norm(last.row_span(i));
    return t;
}

}  // namespace

EncoderParams init_params(std::uint64_t seed, std::size_t d_in,
                          const std::vector<std::size_t>& hidden_dims,
                          Activation activation, bool bias) {
    if (d_in == 0 || hidden_dims.empty())
        throw std::invalid_argument("init_params: dimensions must be >= 1");
    for (std::size_t d : hidden_dims)
        if (d == 0) throw std::invalid_argument("init_params: dimensions must be >= 1");

    EncoderParams p;
    p.activation = activation;
    p.w1 = init_tower(seed * 2 + 0, d_in, hidden_dims);
    p.w2 = init_tower(seed * 2 + 1, d_in, hidden_dims);
    if (bias) {
        for (std::size_t d : hidden_dims) {
            p.b1.emplace_back(d, 0.0);
            p.b2.emplace_back(d, 0.0);
        }
    }
    return p;
}

ViewPair forward(const EncoderParams& p, const DenseMatrix& x1, const DenseMatrix& x2) {
    if (x1.cols != p.w1.front().rows || x2.cols != p.w1.front().rows)
        throw std::invalid_argument("forward: input width does not match encoder");

    ViewPair vp;
    vp.t1 = run_tower(p.w1, p.b1, p.activation, x1);
    vp.t2 = run_tower(p.shared ? p.w1 : p.w2, p.shared ? p.b1 : p.b2, p.activation, x2);
    vp.e1 = row_l2_normalize(vp.t1.post.back());
    vp.e2 = row_l2_normalize(vp.t2.post.back());
    return vp;
}

}  // namespace ccgc
