#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ccgc {

struct MetricReport {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double f1 = 0.0;
    std::vector<std::vector<std::int64_t>> contingency;  // pred x true counts
    std::vector<int> mapping;  // predicted cluster -> true class, -1 if unmatched
};

// Minimum-cost assignment on a square cost matrix; returns column per row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost);

// Best accuracy over injective cluster-to-class mappings, via optimal
// assignment on the contingency matrix (zero-padded when counts differ).
std::pair<double, std::vector<int>> clustering_accuracy(const std::vector<int>& pred,
                                                        const std::vector<int>& truth);

// Mutual information normalized by the arithmetic mean of the entropies.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

// Adjusted Rand index via pair counting.
double ari(const std::vector<int>& pred, const std::vector<int>& truth);

// Unweighted mean of per-class F1 after applying the accuracy-optimal mapping.
double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth);

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace ccgc
