#include "ccgc/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace ccgc {

void adam_update(std::span<double> p, std::span<const double> g, std::vector<double>& m,
                 std::vector<double>& v, std::size_t t, const AdamConfig& cfg) {
    if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size())
        throw std::invalid_argument("adam_update: shape mismatch");
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double grad = g[i] + cfg.weight_decay * p[i];
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad;
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad * grad;
        const double mh = m[i] / bc1;
        const double vh = v[i] / bc2;
        p[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
}

namespace {

std::vector<std::span<double>> param_views(EncoderParams& p) {
    std::vector<std::span<double>> out;
    for (auto& w : p.w1) out.emplace_back(w.data);
    for (auto& w : p.w2) out.emplace_back(w.data);
    for (auto& b : p.b1) out.emplace_back(b);
    for (auto& b : p.b2) out.emplace_back(b);
    return out;
}

std::vector<std::vector<double>> grad_tensors(const EncoderParams& p, const Gradients& g) {
    std::vector<std::vector<double>> out;
    if (g.w1.size() != p.w1.size() || g.w2.size() != p.w2.size())
        throw std::invalid_argument("adam: gradient layout mismatch");
    if (p.shared) {
        // encoder 2 mirrors encoder 1; give it zero gradient and fold the
        // view-2 contribution into encoder 1
        for (std::size_t l = 0; l < g.w1.size(); ++l) {
            std::vector<double> sum = g.w1[l].data;
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g.w2[l].data[i];
            out.push_back(std::move(sum));
        }
        for (const auto& w : g.w2) out.emplace_back(w.data.size(), 0.0);
        for (std::size_t l = 0; l < g.b1.size(); ++l) {
            std::vector<double> sum = g.b1[l];
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g.b2[l][i];
            out.push_back(std::move(sum));
        }
        for (const auto& b : g.b2) out.emplace_back(b.size(), 0.0);
    } else {
        for (const auto& w : g.w1) out.push_back(w.data);
        for (const auto& w : g.w2) out.push_back(w.data);
        for (const auto& b : g.b1) out.push_back(b);
        for (const auto& b : g.b2) out.push_back(b);
    }
    return out;
}

}  // namespace

Adam::Adam(const EncoderParams& shape, AdamConfig cfg) : cfg_(cfg) {
    EncoderParams tmp = shape;
    for (const auto view : param_views(tmp)) {
        m_.emplace_back(view.size(), 0.0);
        v_.emplace_back(view.size(), 0.0);
    }
}

void Adam::step(EncoderParams& params, const Gradients& grads) {
    auto views = param_views(params);
    auto gs = grad_tensors(params, grads);
    if (views.size() != m_.size() || gs.size() != m_.size())
        throw std::invalid_argument("adam: state does not match parameters");
    for (std::size_t i = 0; i < views.size(); ++i)
        if (views[i].size() != m_[i].size() || gs[i].size() != m_[i].size())
            throw std::invalid_argument("adam: tensor shape mismatch");

    if (cfg_.grad_clip > 0.0) {
        double sq = 0.0;
        for (const auto& g : gs)
            for (double x : g) sq += x * x;
        const double norm = std::sqrt(sq);
        if (norm > cfg_.grad_clip) {
            const double scale = cfg_.grad_clip / norm;
            for (auto& g : gs)
                for (double& x : g) x *= scale;
        }
    }

    ++t_;
    for (std::size_t i = 0; i < views.size(); ++i)
        adam_update(views[i], gs[i], m_[i], v_[i], t_, cfg_);

    if (params.shared) {
        params.w2 = params.w1;
        params.b2 = params.b1;
    }
}

}  // namespace ccgc
