// ccgc command line: train / eval / ablate / gradcheck / stats / sweep / make-sbm

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccgc/clustering.hpp"
#include "ccgc/grad.hpp"
#include "ccgc/graph.hpp"
#include "ccgc/metrics.hpp"
#include "ccgc/report.hpp"
#include "ccgc/rng.hpp"
#include "ccgc/trainer.hpp"

namespace fs = std::filesystem;
using namespace ccgc;

namespace {

std::uint64_t parse_u64(const std::string& token, const char* flag) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw CLI::ValidationError(flag, "not a nonnegative integer: " + token);
    }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto dots = token.find("..");
        if (dots != std::string::npos) {
            const std::uint64_t lo = parse_u64(token.substr(0, dots), "--seeds");
            const std::uint64_t hi = parse_u64(token.substr(dots + 2), "--seeds");
            if (hi < lo) throw CLI::ValidationError("--seeds", "range end before start");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else if (!token.empty()) {
            seeds.push_back(parse_u64(token, "--seeds"));
        }
    }
    if (seeds.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
    return seeds;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) dims.push_back(parse_u64(token, "--hidden-dims"));
    if (dims.empty()) throw CLI::ValidationError("--hidden-dims", "no dimensions given");
    return dims;
}

// Train-loop flags shared by train / ablate / sweep. Values typed as strings
// where parsing is custom; explicit flags override --config file settings.
struct TrainFlags {
    std::string config_path;
    std::string seeds = "0";
    std::string hidden_dims = "500";
    std::string activation = "linear";
    std::string pair_mode = "same-node";
    std::string mask_mode = "column";
    std::string bias = "off";
    std::string ablation = "full";
    std::size_t epochs = 400;
    std::size_t stage1_epochs = 0;
    double tau = 0.6, alpha = 1.0;
    std::size_t filter_layers = 2;
    int k = 0;
    std::size_t kmeans_iters = 300, kmeans_every = 1;
    double kmeans_tol = 1e-6;
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    double weight_decay = 0.0, grad_clip = 0.0;
    bool detach_centers = false;
    double aug_rate = 0.2, teleport = 0.2;

    CLI::Option *o_seeds{}, *o_hidden{}, *o_act{}, *o_pair{}, *o_mask{}, *o_bias{},
        *o_epochs{}, *o_stage1{}, *o_tau{}, *o_alpha{}, *o_layers{}, *o_k{}, *o_kiters{},
        *o_kevery{}, *o_ktol{}, *o_lr{}, *o_b1{}, *o_b2{}, *o_aeps{}, *o_wd{}, *o_clip{},
        *o_detach{}, *o_rate{}, *o_tp{}, *o_ablation{};

    void add(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)")
            ->check(CLI::ExistingFile);
        o_seeds = cmd->add_option("--seeds", seeds, "comma list or A..B range");
        o_epochs = cmd->add_option("--epochs", epochs, "training epochs");
        o_stage1 = cmd->add_option("--stage1-epochs", stage1_epochs,
                                   "epochs before confidence filtering starts");
        o_tau = cmd->add_option("--tau", tau, "high-confidence fraction")
                    ->check(CLI::Range(0.0, 1.0));
        o_alpha = cmd->add_option("--alpha", alpha, "negative-loss weight")
                      ->check(CLI::NonNegativeNumber);
        o_layers = cmd->add_option("--filter-layers", filter_layers, "smoothing depth t");
        o_hidden = cmd->add_option("--hidden-dims", hidden_dims, "comma list per layer");
        o_act = cmd->add_option("--activation", activation)
                    ->check(CLI::IsMember({"linear", "relu", "tanh"}));
        o_bias = cmd->add_option("--bias", bias)->check(CLI::IsMember({"on", "off"}));
        o_k = cmd->add_option("--k", k, "cluster count (0: dataset classes)");
        o_kiters = cmd->add_option("--kmeans-iters", kmeans_iters);
        o_ktol = cmd->add_option("--kmeans-tol", kmeans_tol);
        o_kevery = cmd->add_option("--kmeans-every", kmeans_every,
                                   "re-cluster every n epochs");
        o_lr = cmd->add_option("--lr", lr);
        o_b1 = cmd->add_option("--beta1", beta1);
        o_b2 = cmd->add_option("--beta2", beta2);
        o_aeps = cmd->add_option("--adam-eps", adam_eps);
        o_wd = cmd->add_option("--weight-decay", weight_decay);
        o_clip = cmd->add_option("--grad-clip", grad_clip);
        o_pair = cmd->add_option("--pair-mode", pair_mode)
                     ->check(CLI::IsMember({"same-node", "full-intra-cluster", "eq9"}));
        o_detach = cmd->add_flag("--detach-centers", detach_centers,
                                 "centers contribute no gradient");
        o_rate = cmd->add_option("--aug-rate", aug_rate)->check(CLI::Range(0.0, 1.0));
        o_tp = cmd->add_option("--teleport", teleport)->check(CLI::Range(0.0, 1.0));
        o_mask = cmd->add_option("--mask-mode", mask_mode)
                     ->check(CLI::IsMember({"column", "entry"}));
        o_ablation = cmd->add_option("--ablation", ablation, "train a single variant")
                         ->check(CLI::IsMember({"full", "wo-dps", "wo-rns", "drop-edges",
                                                "add-edges", "diffusion", "mask-features"}));
    }

    TrainConfig resolve() const {
        TrainConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            nlohmann::json j;
            f >> j;
            cfg = config_from_json(j, cfg);
        }
        auto set = [](CLI::Option* o) { return o && o->count() > 0; };
        if (set(o_seeds)) cfg.seeds = parse_seeds(seeds);
        if (set(o_epochs)) cfg.epochs = epochs;
        if (set(o_stage1)) cfg.stage1_epochs = stage1_epochs;
        if (set(o_tau)) cfg.tau = tau;
        if (set(o_alpha)) cfg.alpha = alpha;
        if (set(o_layers)) cfg.filter_layers = filter_layers;
        if (set(o_hidden)) cfg.hidden_dims = parse_dims(hidden_dims);
        if (set(o_act)) cfg.activation = activation_from_string(activation);
        if (set(o_bias)) cfg.bias = bias == "on";
        if (set(o_k)) cfg.k = k;
        if (set(o_kiters)) cfg.kmeans_iters = kmeans_iters;
        if (set(o_ktol)) cfg.kmeans_tol = kmeans_tol;
        if (set(o_kevery)) cfg.kmeans_every = kmeans_every;
        if (set(o_lr)) cfg.lr = lr;
        if (set(o_b1)) cfg.beta1 = beta1;
        if (set(o_b2)) cfg.beta2 = beta2;
        if (set(o_aeps)) cfg.adam_eps = adam_eps;
        if (set(o_wd)) cfg.weight_decay = weight_decay;
        if (set(o_clip)) cfg.grad_clip = grad_clip;
        if (set(o_pair)) cfg.pair_mode = pair_mode_from_string(pair_mode);
        if (set(o_detach)) cfg.detach_centers = detach_centers;
        if (set(o_rate)) cfg.aug_rate = aug_rate;
        if (set(o_tp)) cfg.teleport = teleport;
        if (set(o_mask)) cfg.mask_mode = mask_mode_from_string(mask_mode);
        if (set(o_ablation)) cfg.variant = variant_from_string(ablation);
        return cfg;
    }
};

std::vector<int> read_label_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::vector<int> labels;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) labels.push_back(std::stoi(line));
    }
    return labels;
}

void write_summary_csv(const std::string& path, const std::string& param,
                       const std::vector<std::pair<double, RunReport>>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << param << ",acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,ari_std,f1_mean,f1_std\n";
    for (const auto& [value, r] : rows) {
        f << value << ',' << r.acc.mean << ',' << r.acc.stddev << ',' << r.nmi.mean << ','
          << r.nmi.stddev << ',' << r.ari.mean << ',' << r.ari.stddev << ',' << r.f1.mean
          << ',' << r.f1.stddev << '\n';
    }
}

std::string cell(const MetricAggregate& a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f±%.2f", 100.0 * a.mean, 100.0 * a.stddev);
    return buf;
}

int cmd_train(const std::string& data_dir, const TrainFlags& flags,
              const std::string& out, const std::string& embeddings_out,
              const std::string& curves_out) {
    const GraphDataset d = load_dataset(data_dir);
    TrainConfig cfg = flags.resolve();
    cfg.keep_embedding = !embeddings_out.empty();
    if (cfg.variant == AblationVariant::wo_dps && flags.o_tau && flags.o_tau->count() > 0)
        std::cerr << "warning: variant wo-dps ignores --tau\n";

    RunReport report;
    try {
        report = train_multi(d, cfg);
    } catch (const TrainAbort& abort) {
        if (!out.empty()) write_json(report_to_json(abort.partial), out);
        throw;
    }

    if (!out.empty()) write_json(report_to_json(report), out);
    if (!embeddings_out.empty())
        for (const auto& s : report.per_seed)
            write_embedding_csv(s.embedding,
                                embeddings_out + ".seed" + std::to_string(s.seed) + ".csv");
    if (!curves_out.empty())
        for (const auto& s : report.per_seed)
            write_curves_csv(s, curves_out + ".seed" + std::to_string(s.seed) + ".csv");

    if (report.has_metrics)
        std::cout << "acc " << cell(report.acc) << "  nmi " << cell(report.nmi) << "  ari "
                  << cell(report.ari) << "  f1 " << cell(report.f1) << '\n';
    else
        std::cout << "trained " << report.per_seed.size() << " seed(s); no labels, no metrics\n";
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path) {
    const MetricReport r = evaluate(read_label_file(pred_path), read_label_file(truth_path));
    std::cout << metrics_to_json(r).dump(2) << '\n';
    return 0;
}

int cmd_stats(const std::string& data_dir) {
    LoadInfo info;
    const GraphDataset d = load_dataset(data_dir, &info);
    nlohmann::json j = stats_to_json(dataset_stats(d), d.name);
    j["dropped_self_loops"] = info.dropped_self_loops;
    j["deduplicated_edges"] = info.deduplicated_edges;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_gradcheck(std::size_t instances, double epsilon) {
    double worst = 0.0;
    for (std::size_t trial = 0; trial < instances; ++trial) {
        Rng rng(mix_seed(trial, 3));
        const std::size_t n = 8 + rng.index(13);      // <= 20
        const std::size_t d_in = 2 + rng.index(9);    // <= 10
        const std::size_t d_out = 2 + rng.index(3);   // <= 4
        const int k = 2 + static_cast<int>(rng.index(2));

        DenseMatrix x(n, d_in);
        for (double& v : x.data) v = rng.uniform(-1.0, 1.0);
        const EncoderParams params =
            init_params(trial, d_in, {d_out}, Activation::linear, false);
        const ViewPair vp = forward(params, x);
        const ClusterState st =
            make_cluster_state(fuse_views(vp), k, mix_seed(trial, 5), 0.7);
        std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(k));
        for (std::size_t i : st.high_conf)
            groups[static_cast<std::size_t>(st.km.assignments[i])].push_back(i);

        LossConfig cfg;
        cfg.alpha = 1.0;
        worst = std::max(worst, finite_diff_check(params, x, x, groups, cfg, epsilon));
    }
    std::printf("gradcheck: %zu instances, max relative error %.3e\n", instances, worst);
    return worst <= 1e-6 ? 0 : 1;
}

int cmd_sweep(const std::string& data_dir, const TrainFlags& flags,
              const std::string& sweep_spec, const std::string& out_dir) {
    const auto eq = sweep_spec.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--sweep", "expected param=v1,v2,...");
    const std::string param = sweep_spec.substr(0, eq);
    if (param != "tau" && param != "alpha")
        throw CLI::ValidationError("--sweep", "sweepable parameters: tau, alpha");
    std::vector<double> values;
    std::stringstream ss(sweep_spec.substr(eq + 1));
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) values.push_back(std::stod(token));
    if (values.empty()) throw CLI::ValidationError("--sweep", "empty grid");

    const GraphDataset d = load_dataset(data_dir);
    fs::create_directories(out_dir);

    std::vector<std::pair<double, RunReport>> rows;
    for (double v : values) {
        TrainConfig cfg = flags.resolve();
        if (param == "tau") cfg.tau = v;
        else cfg.alpha = v;
        RunReport r = train_multi(d, cfg);
        char name[64];
        std::snprintf(name, sizeof(name), "report_%s_%g.json", param.c_str(), v);
        write_json(report_to_json(r), (fs::path(out_dir) / name).string());
        std::cout << param << "=" << v << "  acc " << cell(r.acc) << "  nmi "
                  << cell(r.nmi) << '\n';
        rows.emplace_back(v, std::move(r));
    }
    write_summary_csv((fs::path(out_dir) / "summary.csv").string(), param, rows);
    return 0;
}

int cmd_ablate(const std::string& data_dir, const TrainFlags& flags,
               std::vector<std::string> variant_names, const std::string& out_dir) {
    if (variant_names.empty())
        variant_names = {"wo-dps",    "wo-rns",   "drop-edges", "add-edges",
                         "diffusion", "mask-features", "full"};
    // comparison table puts the plain method last, labeled Ours
    std::stable_partition(variant_names.begin(), variant_names.end(),
                          [](const std::string& v) { return v != "full"; });

    const GraphDataset d = load_dataset(data_dir);
    fs::create_directories(out_dir);

    std::vector<std::pair<std::string, RunReport>> results;
    for (const auto& name : variant_names) {
        const AblationVariant v = variant_from_string(name);
        RunReport r = run_ablation(d, flags.resolve(), v);
        write_json(report_to_json(r),
                   (fs::path(out_dir) / ("report_" + to_string(v) + ".json")).string());
        results.emplace_back(name, std::move(r));
    }

    std::ofstream table(fs::path(out_dir) / "comparison.csv");
    table << "metric";
    for (const auto& [name, r] : results) table << ',' << (name == "full" ? "Ours" : name);
    table << '\n';
    const std::vector<std::pair<std::string, MetricAggregate RunReport::*>> metrics{
        {"ACC", &RunReport::acc},
        {"NMI", &RunReport::nmi},
        {"ARI", &RunReport::ari},
        {"F1", &RunReport::f1}};
    for (const auto& [label, field] : metrics) {
        table << label;
        std::cout << label << ": ";
        for (const auto& [name, r] : results) {
            table << ',' << cell(r.*field);
            std::cout << (name == "full" ? "Ours" : name) << "=" << cell(r.*field) << "  ";
        }
        table << '\n';
        std::cout << '\n';
    }
    return 0;
}

int cmd_make_sbm(const std::string& out_dir, std::uint64_t seed,
                 const std::string& blocks_spec, double p_in, double p_out,
                 std::size_t feature_dim, double noise) {
    std::vector<std::size_t> blocks;
    std::stringstream ss(blocks_spec);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) blocks.push_back(std::stoull(token));
    const GraphDataset d = make_sbm(seed, blocks, p_in, p_out, feature_dim, noise);
    save_dataset(d, out_dir);
    std::cout << "wrote " << d.num_nodes() << " nodes, " << d.edges.size() << " edges to "
              << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cluster-guided contrastive graph clustering"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "train and evaluate on a dataset bundle");
    std::string train_data, train_out, train_emb, train_curves;
    TrainFlags train_flags;
    train->add_option("--data", train_data, "dataset bundle directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    train_flags.add(train);
    train->add_option("--out", train_out, "report JSON path");
    train->add_option("--dump-embeddings", train_emb, "CSV path prefix per seed");
    train->add_option("--dump-curves", train_curves, "CSV path prefix per seed");

    // eval
    auto* eval = app.add_subcommand("eval", "score a prediction file against labels");
    std::string eval_pred, eval_truth;
    eval->add_option("--pred", eval_pred)->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", eval_truth)->required()->check(CLI::ExistingFile);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "run ablation variants and compare");
    std::string ablate_data, ablate_out = "ablation";
    std::vector<std::string> ablate_variants;
    TrainFlags ablate_flags;
    ablate->add_option("--data", ablate_data)->required()->check(CLI::ExistingDirectory);
    ablate_flags.add(ablate);
    ablate->add_option("--variants", ablate_variants, "subset of variants")
        ->delimiter(',');
    ablate->add_option("--out-dir", ablate_out);

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    std::size_t gc_instances = 50;
    double gc_eps = 1e-5;
    gradcheck->add_option("--instances", gc_instances);
    gradcheck->add_option("--epsilon", gc_eps);

    // stats
    auto* stats = app.add_subcommand("stats", "dataset statistics");
    std::string stats_data;
    stats->add_option("--data", stats_data)->required()->check(CLI::ExistingDirectory);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "hyper-parameter sensitivity sweep");
    std::string sweep_data, sweep_spec, sweep_out = "sweep";
    TrainFlags sweep_flags;
    sweep->add_option("--data", sweep_data)->required()->check(CLI::ExistingDirectory);
    sweep_flags.add(sweep);
    sweep->add_option("--sweep", sweep_spec, "param=v1,v2,... (tau or alpha)")->required();
    sweep->add_option("--out-dir", sweep_out);

    // make-sbm
    auto* sbm = app.add_subcommand("make-sbm", "write a planted-partition bundle");
    std::string sbm_out, sbm_blocks = "30,30";
    std::uint64_t sbm_seed = 0;
    double sbm_pin = 0.9, sbm_pout = 0.05, sbm_noise = 0.3;
    std::size_t sbm_dim = 16;
    sbm->add_option("--out", sbm_out)->required();
    sbm->add_option("--blocks", sbm_blocks, "comma list of block sizes");
    sbm->add_option("--p-in", sbm_pin)->check(CLI::Range(0.0, 1.0));
    sbm->add_option("--p-out", sbm_pout)->check(CLI::Range(0.0, 1.0));
    sbm->add_option("--feature-dim", sbm_dim);
    sbm->add_option("--noise", sbm_noise)->check(CLI::NonNegativeNumber);
    sbm->add_option("--seed", sbm_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) return cmd_train(train_data, train_flags, train_out, train_emb, train_curves);
        if (*eval) return cmd_eval(eval_pred, eval_truth);
        if (*ablate) return cmd_ablate(ablate_data, ablate_flags, ablate_variants, ablate_out);
        if (*gradcheck) return cmd_gradcheck(gc_instances, gc_eps);
        if (*stats) return cmd_stats(stats_data);
        if (*sweep) return cmd_sweep(sweep_data, sweep_flags, sweep_spec, sweep_out);
        if (*sbm)
            return cmd_make_sbm(sbm_out, sbm_seed, sbm_blocks, sbm_pin, sbm_pout, sbm_dim,
                                sbm_noise);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
