#include "ccgc/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "ccgc/rng.hpp"
#include "ccgc/smoothing.hpp"

namespace ccgc {

AblationVariant variant_from_string(const std::string& s) {
    if (s == "full") return AblationVariant::full;
    if (s == "wo-dps" || s == "wo_dps") return AblationVariant::wo_dps;
    if (s == "wo-rns" || s == "wo_rns") return AblationVariant::wo_rns;
    if (s == "drop-edges" || s == "drop_edges") return AblationVariant::drop_edges;
    if (s == "add-edges" || s == "add_edges") return AblationVariant::add_edges;
    if (s == "diffusion") return AblationVariant::diffusion;
    if (s == "mask-features" || s == "mask_features") return AblationVariant::mask_features;
    throw std::invalid_argument("unknown ablation variant: " + s);
}

std::string to_string(AblationVariant v) {
    switch (v) {
        case AblationVariant::full: return "full";
        case AblationVariant::wo_dps: return "wo-dps";
        case AblationVariant::wo_rns: return "wo-rns";
        case AblationVariant::drop_edges: return "drop-edges";
        case AblationVariant::add_edges: return "add-edges";
        case AblationVariant::diffusion: return "diffusion";
        case AblationVariant::mask_features: return "mask-features";
    }
    return "full";
}

namespace {

bool is_augment_variant(AblationVariant v) {
    return v == AblationVariant::drop_edges || v == AblationVariant::add_edges ||
           v == AblationVariant::diffusion || v == AblationVariant::mask_features;
}

// Sub-seed streams within one run.
constexpr std::uint64_t kAugmentStream = 1u << 20;

}  // namespace

SeedResult train_one(const GraphDataset& d, const TrainConfig& cfg, std::uint64_t seed) {
    const auto t_start = std::chrono::steady_clock::now();

    const int k = cfg.k > 0 ? cfg.k : d.num_classes;
    if (k < 2) throw std::invalid_argument("train: needs at least two clusters");
    if (static_cast<std::size_t>(k) > d.num_nodes())
        throw std::invalid_argument("train: more clusters than nodes");
    if (cfg.resolved_stage1() > cfg.epochs)
        throw std::invalid_argument("train: stage1_epochs exceeds epochs");
    if (cfg.seeds.empty()) throw std::invalid_argument("train: no seeds");

    // View inputs. The plain method feeds both encoders the same smoothed
    // attributes; augmentation variants derive the second view differently
    // and share encoder parameters.
    const PropagationOperator op = build_operator(d, cfg.filter_layers);
    const DenseMatrix x1 = smooth(op, d.features);
    DenseMatrix x2_storage;
    const DenseMatrix* x2 = &x1;
    switch (cfg.variant) {
        case AblationVariant::drop_edges: {
            const GraphDataset aug = drop_edges(d, cfg.aug_rate, mix_seed(seed, kAugmentStream));
            x2_storage = smooth(build_operator(aug, cfg.filter_layers), d.features);
            x2 = &x2_storage;
            break;
        }
        case AblationVariant::add_edges: {
            const GraphDataset aug = add_edges(d, cfg.aug_rate, mix_seed(seed, kAugmentStream));
            x2_storage = smooth(build_operator(aug, cfg.filter_layers), d.features);
            x2 = &x2_storage;
            break;
        }
        case AblationVariant::mask_features: {
            const GraphDataset aug =
                mask_features(d, cfg.aug_rate, mix_seed(seed, kAugmentStream), cfg.mask_mode);
            x2_storage = smooth(op, aug.features);
            x2 = &x2_storage;
            break;
        }
        case AblationVariant::diffusion: {
            x2_storage = matmul(diffusion(d, cfg.teleport).matrix, d.features);
            x2 = &x2_storage;
            break;
        }
        default:
            break;
    }

    EncoderParams params = init_params(seed, d.num_features(), cfg.hidden_dims,
                                       cfg.activation, cfg.bias);
    params.shared = is_augment_variant(cfg.variant);

    LossConfig lc;
    lc.alpha = cfg.alpha;
    lc.pair_mode = cfg.pair_mode;
    lc.negative_mode = cfg.variant == AblationVariant::wo_rns
                           ? NegativeMode::all_node_pairs
                           : NegativeMode::cluster_centers;
    lc.detach_centers = cfg.detach_centers;

    Adam adam(params, {cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay,
                       cfg.grad_clip});

    SeedResult res;
    res.seed = seed;
    res.curves.reserve(cfg.epochs);

    std::vector<std::vector<std::size_t>> groups;  // reused between throttled epochs
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const ViewPair vp = forward(params, x1, *x2);
        const DenseMatrix fused = fuse_views(vp);

        // Stage 1 trains on every node; confidence filtering starts in
        // stage 2. The wo-dps variant never filters.
        const bool filter = epoch >= cfg.resolved_stage1() &&
                            cfg.variant != AblationVariant::wo_dps;
        const double tau_eff = filter ? cfg.tau : 1.0;

        if (epoch % cfg.kmeans_every == 0 || groups.empty()) {
            const ClusterState st = make_cluster_state(
                fused, k, mix_seed(seed, epoch), tau_eff, cfg.kmeans_iters, cfg.kmeans_tol);
            groups.assign(static_cast<std::size_t>(k), {});
            for (std::size_t i : st.high_conf)
                groups[static_cast<std::size_t>(st.km.assignments[i])].push_back(i);
        }
        const ContrastBatch batch = batch_from_groups(vp, groups);

        const BackwardResult br = backward(params, x1, *x2, vp, batch, lc);
        if (!std::isfinite(br.loss.total))
            throw std::runtime_error(
                "train: non-finite loss at epoch " + std::to_string(epoch) + " (l_pos=" +
                std::to_string(br.loss.l_pos) + ", l_neg=" + std::to_string(br.loss.l_neg) +
                ", |h|=" + std::to_string(batch.selected()) + ")");
        adam.step(params, br.grads);

        res.curves.push_back(
            {br.loss.l_pos, br.loss.l_neg, br.loss.total, batch.selected()});
    }

    // Final clustering on the fused embedding.
    const ViewPair vp = forward(params, x1, *x2);
    const DenseMatrix fused = fuse_views(vp);
    const KmeansResult km = kmeans(fused, k, mix_seed(seed, cfg.epochs),
                                   cfg.kmeans_iters, cfg.kmeans_tol);
    res.assignments = km.assignments;
    res.final_inertia = km.inertia;
    if (d.has_labels()) {
        res.metrics = evaluate(km.assignments, d.labels);
        res.has_metrics = true;
    }
    if (cfg.keep_embedding) res.embedding = fused;

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

namespace {

MetricAggregate aggregate(const std::vector<SeedResult>& seeds,
                          double MetricReport::*field) {
    MetricAggregate a;
    if (seeds.empty()) return a;
    for (const auto& s : seeds) a.mean += s.metrics.*field;
    a.mean /= static_cast<double>(seeds.size());
    double var = 0.0;
    for (const auto& s : seeds) {
        const double dev = s.metrics.*field - a.mean;
        var += dev * dev;
    }
    a.stddev = std::sqrt(var / static_cast<double>(seeds.size()));
    return a;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("CCGC_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 1;
}

std::vector<std::string> standard_notes(const TrainConfig& cfg) {
    std::vector<std::string> notes;
    notes.push_back(
        "encoder width/activation, optimizer settings, and the stage-1 boundary are "
        "conventional defaults; tune per dataset with the sweep command");
    notes.push_back(
        "top-tau selection force-includes the most confident node of any cluster the "
        "cut would otherwise empty");
    notes.push_back("stage 1 covers the first " + std::to_string(cfg.resolved_stage1()) +
                    " of " + std::to_string(cfg.epochs) +
                    " epochs and trains on all nodes (no confidence filtering)");
    if (cfg.variant == AblationVariant::wo_dps)
        notes.push_back("variant wo-dps disables confidence filtering; --tau is ignored");
    if (is_augment_variant(cfg.variant))
        notes.push_back("augmentation variant: encoders share parameters and view 2 is "
                        "built from the augmented input");
    return notes;
}

}  // namespace

RunReport train_multi(const GraphDataset& d, const TrainConfig& cfg) {
    if (cfg.seeds.empty()) throw std::invalid_argument("train: no seeds");

    RunReport report;
    report.dataset = d.name;
    report.config = cfg;
    report.notes = standard_notes(cfg);

    const std::size_t workers =
        std::min<std::size_t>(std::max<std::size_t>(worker_count(), 1), cfg.seeds.size());
    std::vector<SeedResult> results(cfg.seeds.size());
    std::vector<char> done(cfg.seeds.size(), 0);
    std::vector<std::exception_ptr> errors(cfg.seeds.size());

    if (workers <= 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            try {
                results[i] = train_one(d, cfg, cfg.seeds[i]);
                done[i] = 1;
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto run = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cfg.seeds.size()) return;
                try {
                    results[i] = train_one(d, cfg, cfg.seeds[i]);
                    done[i] = 1;
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (!errors[i]) {
            if (done[i]) report.per_seed.push_back(std::move(results[i]));
            continue;
        }
        // A seed failed: finish the partial report and abort.
        report.has_metrics = !report.per_seed.empty() && report.per_seed.front().has_metrics;
        if (report.has_metrics) {
            report.acc = aggregate(report.per_seed, &MetricReport::acc);
            report.nmi = aggregate(report.per_seed, &MetricReport::nmi);
            report.ari = aggregate(report.per_seed, &MetricReport::ari);
            report.f1 = aggregate(report.per_seed, &MetricReport::f1);
        }
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw TrainAbort("seed " + std::to_string(cfg.seeds[i]) + " failed: " + e.what(),
                             std::move(report));
        }
    }

    report.has_metrics = !report.per_seed.empty() && report.per_seed.front().has_metrics;
    if (report.has_metrics) {
        report.acc = aggregate(report.per_seed, &MetricReport::acc);
        report.nmi = aggregate(report.per_seed, &MetricReport::nmi);
        report.ari = aggregate(report.per_seed, &MetricReport::ari);
        report.f1 = aggregate(report.per_seed, &MetricReport::f1);
    }
    return report;
}

RunReport run_ablation(const GraphDataset& d, const TrainConfig& cfg,
                       AblationVariant variant) {
    TrainConfig c = cfg;
    c.variant = variant;
    return train_multi(d, c);
}

}  // namespace ccgc
