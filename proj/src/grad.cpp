#include "ccgc/grad.hpp"

#include <cmath>
#include <stdexcept>

namespace ccgc {

namespace {

// d cos(u,v) / du = v/(|u||v|) - cos(u,v) u/|u|^2 ; zero when either is zero.
void add_cosine_grad(const double* u, const double* v, std::size_t d, double coeff,
                     double* du, double* dv) {
    double nu2 = 0.0, nv2 = 0.0, uv = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        nu2 += u[j] * u[j];
        nv2 += v[j] * v[j];
        uv += u[j] * v[j];
    }
    if (nu2 == 0.0 || nv2 == 0.0) return;
    const double nu = std::sqrt(nu2), nv = std::sqrt(nv2);
    const double inv = 1.0 / (nu * nv);
    const double c = uv * inv;
    for (std::size_t j = 0; j < d; ++j) {
        du[j] += coeff * (v[j] * inv - c * u[j] / nu2);
        dv[j] += coeff * (u[j] * inv - c * v[j] / nv2);
    }
}

// Gradient of the loss with respect to the normalized embeddings.
void embedding_grads(const ViewPair& vp, const ContrastBatch& batch,
                     const LossConfig& cfg, DenseMatrix& de1, DenseMatrix& de2) {
    const std::size_t d = vp.e1.cols;
    const double k = static_cast<double>(batch.k);

    // positive term
    const double pc = 2.0 / k;
    for (const auto& cluster : batch.cluster_nodes) {
        if (cfg.pair_mode == PairMode::same_node) {
            for (std::size_t i : cluster) {
                const double* r1 = vp.e1.row(i);
                const double* r2 = vp.e2.row(i);
                double* g1 = de1.row(i);
                double* g2 = de2.row(i);
                for (std::size_t j = 0; j < d; ++j) {
                    const double diff = r1[j] - r2[j];
                    g1[j] += pc * diff;
                    g2[j] -= pc * diff;
                }
            }
        } else {
            const double np = static_cast<double>(cluster.size());
            std::vector<double> s1(d, 0.0), s2(d, 0.0);
            for (std::size_t i : cluster) {
                const double* r1 = vp.e1.row(i);
                const double* r2 = vp.e2.row(i);
                for (std::size_t j = 0; j < d; ++j) {
                    s1[j] += r1[j];
                    s2[j] += r2[j];
                }
            }
            for (std::size_t i : cluster) {
                const double* r1 = vp.e1.row(i);
                const double* r2 = vp.e2.row(i);
                double* g1 = de1.row(i);
                double* g2 = de2.row(i);
                for (std::size_t j = 0; j < d; ++j) {
                    g1[j] += pc * (np * r1[j] - s2[j]);
                    g2[j] += pc * (np * r2[j] - s1[j]);
                }
            }
        }
    }

    // negative term
    if (cfg.negative_mode == NegativeMode::cluster_centers) {
        if (cfg.detach_centers || cfg.alpha == 0.0) return;
        const std::size_t ku = batch.cen1.rows;
        const double nc = cfg.alpha / static_cast<double>(ku * ku - ku);
        DenseMatrix dcen1(ku, d, 0.0), dcen2(ku, d, 0.0);
        for (std::size_t p = 0; p < ku; ++p)
            for (std::size_t q = 0; q < ku; ++q) {
                if (p == q) continue;
                add_cosine_grad(batch.cen1.row(p), batch.cen2.row(q), d, nc,
                                dcen1.row(p), dcen2.row(q));
            }
        // centers are plain means: distribute 1/n_p to each member row
        for (std::size_t p = 0; p < ku; ++p) {
            const double inv = 1.0 / static_cast<double>(batch.cluster_nodes[p].size());
            const double* c1 = dcen1.row(p);
            const double* c2 = dcen2.row(p);
            for (std::size_t i : batch.cluster_nodes[p]) {
                double* g1 = de1.row(i);
                double* g2 = de2.row(i);
                for (std::size_t j = 0; j < d; ++j) {
                    g1[j] += c1[j] * inv;
                    g2[j] += c2[j] * inv;
                }
            }
        }
    } else {
        if (cfg.alpha == 0.0) return;
        const std::size_t n = vp.e1.rows;
        const double nc = cfg.alpha / static_cast<double>(n * n - n);
        std::vector<double> s1(d, 0.0), s2(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* r1 = vp.e1.row(i);
            const double* r2 = vp.e2.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                s1[j] += r1[j];
                s2[j] += r2[j];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double* r1 = vp.e1.row(i);
            const double* r2 = vp.e2.row(i);
            double* g1 = de1.row(i);
            double* g2 = de2.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                g1[j] += nc * (s2[j] - r2[j]);
                g2[j] += nc * (s1[j] - r1[j]);
            }
        }
    }
}

// Backward through row normalization: da = (g - <e,g> e) / |a|; zero rows
// carry zero gradient, matching the forward convention.
DenseMatrix norm_backward(const ForwardTrace& t, const DenseMatrix& e,
                          const DenseMatrix& de) {
    const DenseMatrix& a = t.post.back();
    DenseMatrix da(a.rows, a.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double norm = t.row_norm[i];
        if (norm == 0.0) continue;
        const double* erow = e.row(i);
        const double* grow = de.row(i);
        double eg = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) eg += erow[j] * grow[j];
        double* out = da.row(i);
        const double inv = 1.0 / norm;
        for (std::size_t j = 0; j < a.cols; ++j) out[j] = (grow[j] - eg * erow[j]) * inv;
    }
    return da;
}

void activation_backward_inplace(Activation act, const DenseMatrix& pre,
                                 const DenseMatrix& post, DenseMatrix& dpost) {
    switch (act) {
        case Activation::linear:
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < dpost.data.size(); ++i)
                if (pre.data[i] <= 0.0) dpost.data[i] = 0.0;
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < dpost.data.size(); ++i)
                dpost.data[i] *= 1.0 - post.data[i] * post.data[i];
            break;
    }
}

// Walks one tower back from d(normalized output) to weight/bias grads.
void tower_backward(const std::vector<DenseMatrix>& ws, Activation act,
                    const DenseMatrix& x, const ForwardTrace& t, const DenseMatrix& e,
                    const DenseMatrix& de, bool bias, std::vector<DenseMatrix>& gw,
                    std::vector<std::vector<double>>& gb) {
    const std::size_t layers = ws.size();
    gw.resize(layers);
    if (bias) gb.resize(layers);

    DenseMatrix dpost = norm_backward(t, e, de);
    for (std::size_t l = layers; l-- > 0;) {
        activation_backward_inplace(act, t.pre[l], t.post[l], dpost);  // now d(pre_l)
        const DenseMatrix& input = l == 0 ? x : t.post[l - 1];
        gw[l] = matmul(transpose(input), dpost);
        if (bias) {
            gb[l].assign(dpost.cols, 0.0);
            for (std::size_t i = 0; i < dpost.rows; ++i) {
                const double* row = dpost.row(i);
                for (std::size_t j = 0; j < dpost.cols; ++j) gb[l][j] += row[j];
            }
        }
        if (l > 0) dpost = matmul(dpost, transpose(ws[l]));
    }
}

LossBreakdown compute_loss(const ViewPair& vp, const ContrastBatch& batch,
                           const LossConfig& cfg) {
    const double l_pos = positive_loss(vp.e1, vp.e2, batch, cfg.pair_mode);
    const double l_neg = cfg.negative_mode == NegativeMode::cluster_centers
                             ? negative_loss(batch)
                             : negative_loss_all_pairs(vp.e1, vp.e2);
    return total_loss(l_pos, l_neg, cfg.alpha);
}

}  // namespace

BackwardResult backward(const EncoderParams& params, const DenseMatrix& x1,
                        const DenseMatrix& x2, const ViewPair& vp,
                        const ContrastBatch& batch, const LossConfig& cfg) {
    if (batch.cen1.cols != vp.e1.cols || batch.k <= 0)
        throw std::invalid_argument("backward: batch does not match current embeddings");
    for (const auto& cluster : batch.cluster_nodes)
        for (std::size_t i : cluster)
            if (i >= vp.e1.rows)
                throw std::invalid_argument("backward: stale selection index");

    BackwardResult out;
    out.loss = compute_loss(vp, batch, cfg);

    DenseMatrix de1(vp.e1.rows, vp.e1.cols, 0.0);
    DenseMatrix de2(vp.e2.rows, vp.e2.cols, 0.0);
    embedding_grads(vp, batch, cfg, de1, de2);

    const bool bias = params.has_bias();
    const auto& tower2 = params.shared ? params.w1 : params.w2;
    tower_backward(params.w1, params.activation, x1, vp.t1, vp.e1, de1, bias,
                   out.grads.w1, out.grads.b1);
    tower_backward(tower2, params.activation, x2, vp.t2, vp.e2, de2, bias,
                   out.grads.w2, out.grads.b2);
    return out;
}

double loss_on_frozen(const EncoderParams& params, const DenseMatrix& x1,
                      const DenseMatrix& x2,
                      const std::vector<std::vector<std::size_t>>& groups,
                      const LossConfig& cfg) {
    const ViewPair vp = forward(params, x1, x2);
    const ContrastBatch batch = batch_from_groups(vp, groups);
    const LossBreakdown lb = compute_loss(vp, batch, cfg);
    // With detached centers the negative term is a stopped-gradient
    // constant; the probed objective is the part the optimizer sees.
    if (cfg.detach_centers && cfg.negative_mode == NegativeMode::cluster_centers)
        return lb.l_pos;
    return lb.total;
}

namespace {

double probe(EncoderParams& params, double* slot, const DenseMatrix& x1,
             const DenseMatrix& x2, const std::vector<std::vector<std::size_t>>& groups,
             const LossConfig& cfg, double eps) {
    const double saved = *slot;
    *slot = saved + eps;
    const double up = loss_on_frozen(params, x1, x2, groups, cfg);
    *slot = saved - eps;
    const double down = loss_on_frozen(params, x1, x2, groups, cfg);
    *slot = saved;
    return (up - down) / (2.0 * eps);
}

double rel_err(double a, double f) {
    return std::abs(a - f) / std::max({1.0, std::abs(a), std::abs(f)});
}

}  // namespace

double finite_diff_check(const EncoderParams& params, const DenseMatrix& x1,
                         const DenseMatrix& x2,
                         const std::vector<std::vector<std::size_t>>& groups,
                         const LossConfig& cfg, double epsilon) {
    const ViewPair vp = forward(params, x1, x2);
    const ContrastBatch batch = batch_from_groups(vp, groups);
    const BackwardResult br = backward(params, x1, x2, vp, batch, cfg);

    EncoderParams work = params;
    double worst = 0.0;

    auto check_tensor = [&](std::vector<double>& data, const std::vector<double>& g1,
                            const std::vector<double>* g2) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double analytic = g1[i] + (g2 ? (*g2)[i] : 0.0);
            const double fd = probe(work, &data[i], x1, x2, groups, cfg, epsilon);
            worst = std::max(worst, rel_err(analytic, fd));
        }
    };

    for (std::size_t l = 0; l < work.w1.size(); ++l) {
        // In shared mode a w1 scalar feeds both towers, so its total
        // derivative is the sum of both tower gradients.
        check_tensor(work.w1[l].data, br.grads.w1[l].data,
                     params.shared ? &br.grads.w2[l].data : nullptr);
        if (!params.shared) check_tensor(work.w2[l].data, br.grads.w2[l].data, nullptr);
    }
    for (std::size_t l = 0; l < work.b1.size(); ++l) {
        check_tensor(work.b1[l], br.grads.b1[l],
                     params.shared ? &br.grads.b2[l] : nullptr);
        if (!params.shared) check_tensor(work.b2[l], br.grads.b2[l], nullptr);
    }
    return worst;
}

}  // namespace ccgc
