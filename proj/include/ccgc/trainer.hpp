#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccgc/augment.hpp"
#include "ccgc/clustering.hpp"
#include "ccgc/grad.hpp"
#include "ccgc/graph.hpp"
#include "ccgc/losses.hpp"
#include "ccgc/metrics.hpp"
#include "ccgc/model.hpp"
#include "ccgc/optim.hpp"

namespace ccgc {

// full: the plain method. wo_dps / wo_rns: replace one sample-construction
// strategy with the regular fashion. The remaining four share encoder
// parameters and derive the second view from an augmented input instead.
enum class AblationVariant {
    full,
    wo_dps,
    wo_rns,
    drop_edges,
    add_edges,
    diffusion,
    mask_features,
};

AblationVariant variant_from_string(const std::string& s);
std::string to_string(AblationVariant v);

struct TrainConfig {
    std::size_t epochs = 400;
    std::optional<std::size_t> stage1_epochs;  // defaults to epochs / 4
    double tau = 0.6;
    double alpha = 1.0;
    std::size_t filter_layers = 2;
    std::vector<std::size_t> hidden_dims = {500};
    Activation activation = Activation::linear;
    bool bias = false;
    int k = 0;  // 0: use the dataset's class count
    std::size_t kmeans_iters = 300;
    double kmeans_tol = 1e-6;
    std::size_t kmeans_every = 1;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.0;
    double grad_clip = 0.0;
    PairMode pair_mode = PairMode::same_node;
    bool detach_centers = false;
    AblationVariant variant = AblationVariant::full;
    double aug_rate = 0.2;
    double teleport = 0.2;
    MaskMode mask_mode = MaskMode::column;
    std::vector<std::uint64_t> seeds = {0};
    bool keep_embedding = false;  // retain the final fused embedding per seed

    std::size_t resolved_stage1() const { return stage1_epochs.value_or(epochs / 4); }
};

struct EpochRecord {
    double l_pos = 0.0;
    double l_neg = 0.0;
    double total = 0.0;
    std::size_t h_size = 0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    MetricReport metrics;  // meaningful only when the dataset has labels
    bool has_metrics = false;
    std::vector<int> assignments;
    double final_inertia = 0.0;
    std::vector<EpochRecord> curves;
    double wall_seconds = 0.0;
    DenseMatrix embedding;  // filled when keep_embedding is set
};

struct MetricAggregate {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
};

struct RunReport {
    std::string dataset;
    TrainConfig config;
    std::vector<SeedResult> per_seed;
    bool has_metrics = false;
    MetricAggregate acc, nmi, ari, f1;
    std::vector<std::string> notes;
};

// One run of the training loop: smooth once, then per epoch encode both
// views, fuse, cluster, select high-confidence samples, build the contrast
// batch, take an Adam step; K-means on the final fused embedding gives the
// clustering result.
SeedResult train_one(const GraphDataset& d, const TrainConfig& cfg, std::uint64_t seed);

// Runs every seed (optionally fanned out across CCGC_THREADS workers) and
// aggregates mean +- std per metric.
RunReport train_multi(const GraphDataset& d, const TrainConfig& cfg);

RunReport run_ablation(const GraphDataset& d, const TrainConfig& cfg,
                       AblationVariant variant);

// Raised when a seed fails; carries the report of the seeds that finished.
struct TrainAbort : std::runtime_error {
    TrainAbort(const std::string& msg, RunReport done)
        : std::runtime_error(msg), partial(std::move(done)) {}
    RunReport partial;
};

}  // namespace ccgc
