#include "ccgc/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ccgc {

using nlohmann::json;

json config_to_json(const TrainConfig& cfg) {
    return json{{"epochs", cfg.epochs},
                {"stage1_epochs", cfg.resolved_stage1()},
                {"tau", cfg.tau},
                {"alpha", cfg.alpha},
                {"filter_layers", cfg.filter_layers},
                {"hidden_dims", cfg.hidden_dims},
                {"activation", to_string(cfg.activation)},
                {"bias", cfg.bias},
                {"k", cfg.k},
                {"kmeans_iters", cfg.kmeans_iters},
                {"kmeans_tol", cfg.kmeans_tol},
                {"kmeans_every", cfg.kmeans_every},
                {"lr", cfg.lr},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"adam_eps", cfg.adam_eps},
                {"weight_decay", cfg.weight_decay},
                {"grad_clip", cfg.grad_clip},
                {"pair_mode", to_string(cfg.pair_mode)},
                {"detach_centers", cfg.detach_centers},
                {"variant", to_string(cfg.variant)},
                {"aug_rate", cfg.aug_rate},
                {"teleport", cfg.teleport},
                {"mask_mode", cfg.mask_mode == MaskMode::column ? "column" : "entry"},
                {"seeds", cfg.seeds}};
}

TrainConfig config_from_json(const json& j, TrainConfig base) {
    TrainConfig c = std::move(base);
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("stage1_epochs")) c.stage1_epochs = j["stage1_epochs"].get<std::size_t>();
    if (j.contains("tau")) c.tau = j["tau"].get<double>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("filter_layers")) c.filter_layers = j["filter_layers"].get<std::size_t>();
    if (j.contains("hidden_dims"))
        c.hidden_dims = j["hidden_dims"].get<std::vector<std::size_t>>();
    if (j.contains("activation"))
        c.activation = activation_from_string(j["activation"].get<std::string>());
    if (j.contains("bias")) c.bias = j["bias"].get<bool>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("kmeans_iters")) c.kmeans_iters = j["kmeans_iters"].get<std::size_t>();
    if (j.contains("kmeans_tol")) c.kmeans_tol = j["kmeans_tol"].get<double>();
    if (j.contains("kmeans_every")) c.kmeans_every = j["kmeans_every"].get<std::size_t>();
    if (j.contains("lr")) c.lr = j["lr"].get<double>();
    if (j.contains("beta1")) c.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) c.beta2 = j["beta2"].get<double>();
    if (j.contains("adam_eps")) c.adam_eps = j["adam_eps"].get<double>();
    if (j.contains("weight_decay")) c.weight_decay = j["weight_decay"].get<double>();
    if (j.contains("grad_clip")) c.grad_clip = j["grad_clip"].get<double>();
    if (j.contains("pair_mode"))
        c.pair_mode = pair_mode_from_string(j["pair_mode"].get<std::string>());
    if (j.contains("detach_centers")) c.detach_centers = j["detach_centers"].get<bool>();
    if (j.contains("variant"))
        c.variant = variant_from_string(j["variant"].get<std::string>());
    if (j.contains("aug_rate")) c.aug_rate = j["aug_rate"].get<double>();
    if (j.contains("teleport")) c.teleport = j["teleport"].get<double>();
    if (j.contains("mask_mode"))
        c.mask_mode = mask_mode_from_string(j["mask_mode"].get<std::string>());
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    return c;
}

json metrics_to_json(const MetricReport& m) {
    return json{{"acc", m.acc},
                {"nmi", m.nmi},
                {"ari", m.ari},
                {"f1", m.f1},
                {"contingency", m.contingency},
                {"mapping", m.mapping}};
}

json report_to_json(const RunReport& r) {
    json seeds = json::array();
    for (const auto& s : r.per_seed) {
        json curves{{"l_pos", json::array()},
                    {"l_neg", json::array()},
                    {"total", json::array()},
                    {"h_size", json::array()}};
        for (const auto& e : s.curves) {
            curves["l_pos"].push_back(e.l_pos);
            curves["l_neg"].push_back(e.l_neg);
            curves["total"].push_back(e.total);
            curves["h_size"].push_back(e.h_size);
        }
        json entry{{"seed", s.seed},
                   {"wall_seconds", s.wall_seconds},
                   {"final_inertia", s.final_inertia},
                   {"curves", curves}};
        if (s.has_metrics)
            entry["metrics"] = json{{"acc", s.metrics.acc},
                                    {"nmi", s.metrics.nmi},
                                    {"ari", s.metrics.ari},
                                    {"f1", s.metrics.f1}};
        seeds.push_back(std::move(entry));
    }

    json out{{"dataset", r.dataset},
             {"config", config_to_json(r.config)},
             {"notes", r.notes},
             {"seeds", seeds}};
    if (r.has_metrics) {
        auto agg = [](const MetricAggregate& a) {
            return json{{"mean", a.mean}, {"std", a.stddev}};
        };
        out["aggregate"] = json{{"acc", agg(r.acc)},
                                {"nmi", agg(r.nmi)},
                                {"ari", agg(r.ari)},
                                {"f1", agg(r.f1)}};
    }
    return out;
}

json stats_to_json(const DatasetStats& s, const std::string& name) {
    json out{{"name", name},
             {"nodes", s.nodes},
             {"feature_dim", s.feature_dim},
             {"edges", s.edges},
             {"num_classes", s.num_classes}};
    if (!s.class_histogram.empty()) out["class_histogram"] = s.class_histogram;
    return out;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
}

void write_curves_csv(const SeedResult& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "epoch,l_pos,l_neg,total,h_size\n";
    for (std::size_t i = 0; i < s.curves.size(); ++i) {
        const auto& e = s.curves[i];
        f << i << ',' << e.l_pos << ',' << e.l_neg << ',' << e.total << ',' << e.h_size
          << '\n';
    }
}

void write_embedding_csv(const DenseMatrix& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    char buf[32];
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            f << (j ? "," : "") << buf;
        }
        f << '\n';
    }
}

}  // namespace ccgc
