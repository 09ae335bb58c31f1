#pragma once

#include <string>

#include "json.hpp"

#include "ccgc/graph.hpp"
#include "ccgc/trainer.hpp"

namespace ccgc {

// Reports embed the fully resolved config so every run is reproducible
// from its own output.
nlohmann::json config_to_json(const TrainConfig& cfg);

// Applies the keys present in j on top of the given defaults.
TrainConfig config_from_json(const nlohmann::json& j, TrainConfig base = {});

nlohmann::json report_to_json(const RunReport& r);
nlohmann::json metrics_to_json(const MetricReport& m);
nlohmann::json stats_to_json(const DatasetStats& s, const std::string& name);

void write_json(const nlohmann::json& j, const std::string& path);

// epoch, l_pos, l_neg, total, h_size rows for one seed
void write_curves_csv(const SeedResult& s, const std::string& path);

void write_embedding_csv(const DenseMatrix& m, const std::string& path);

}  // namespace ccgc
