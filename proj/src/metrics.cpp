#include "ccgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ccgc {

std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("hungarian: cost matrix not square");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) assignment[p[j] - 1] = j - 1;
    return assignment;
}

namespace {

struct Compacted {
    std::vector<int> ids;       // compacted 0..k-1, ascending by original value
    std::vector<int> values;    // original value per compact id
};

Compacted compact_labels(const std::vector<int>& labels) {
    std::map<int, int> index;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("labels must be nonnegative");
        index.emplace(l, 0);
    }
    Compacted c;
    for (auto& [value, idx] : index) {
        idx = static_cast<int>(c.values.size());
        c.values.push_back(value);
    }
    c.ids.reserve(labels.size());
    for (int l : labels) c.ids.push_back(index[l]);
    return c;
}

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("metrics: prediction/truth length mismatch");
    if (pred.empty()) throw std::invalid_argument("metrics: empty input");
}

std::vector<std::vector<std::int64_t>> contingency_table(const Compacted& p,
                                                         const Compacted& t) {
    std::vector<std::vector<std::int64_t>> m(p.values.size(),
                                             std::vector<std::int64_t>(t.values.size(), 0));
    for (std::size_t i = 0; i < p.ids.size(); ++i)
        ++m[static_cast<std::size_t>(p.ids[i])][static_cast<std::size_t>(t.ids[i])];
    return m;
}

}  // namespace

std::pair<double, std::vector<int>> clustering_accuracy(const std::vector<int>& pred,
                                                        const std::vector<int>& truth) {
    check_lengths(pred, truth);
    const Compacted p = compact_labels(pred), t = compact_labels(truth);
    const auto m = contingency_table(p, t);
    const std::size_t np = p.values.size(), nt = t.values.size();
    const std::size_t s = std::max(np, nt);

    std::vector<std::vector<double>> cost(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < nt; ++j) cost[i][j] = -static_cast<double>(m[i][j]);
    const std::vector<int> assign = hungarian(cost);

    std::int64_t matched = 0;
    std::vector<int> mapping(np, -1);
    for (std::size_t i = 0; i < np; ++i) {
        const int j = assign[i];
        if (j >= 0 && static_cast<std::size_t>(j) < nt) {
            matched += m[i][static_cast<std::size_t>(j)];
            mapping[i] = t.values[static_cast<std::size_t>(j)];
        }
    }
    return {static_cast<double>(matched) / static_cast<double>(pred.size()), mapping};
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth);
    const Compacted p = compact_labels(pred), t = compact_labels(truth);
    const auto m = contingency_table(p, t);
    const double n = static_cast<double>(pred.size());

    std::vector<double> a(p.values.size(), 0.0), b(t.values.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            a[i] += static_cast<double>(m[i][j]);
            b[j] += static_cast<double>(m[i][j]);
        }

    double ha = 0.0, hb = 0.0;
    for (double x : a)
        if (x > 0) ha -= x / n * std::log(x / n);
    for (double x : b)
        if (x > 0) hb -= x / n * std::log(x / n);
    if (ha == 0.0 && hb == 0.0) return 1.0;  // two single-cluster partitions
    if (ha == 0.0 || hb == 0.0) return 0.0;

    double mi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double nij = static_cast<double>(m[i][j]);
            if (nij > 0) mi += nij / n * std::log(nij * n / (a[i] * b[j]));
        }
    return 2.0 * mi / (ha + hb);
}

double ari(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth);
    if (pred.size() < 2) return 1.0;  // a single point forms identical partitions
    const Compacted p = compact_labels(pred), t = compact_labels(truth);
    const auto m = contingency_table(p, t);
    const double n = static_cast<double>(pred.size());
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };

    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    std::vector<double> a(p.values.size(), 0.0), b(t.values.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double nij = static_cast<double>(m[i][j]);
            index += choose2(nij);
            a[i] += nij;
            b[j] += nij;
        }
    for (double x : a) sum_a += choose2(x);
    for (double x : b) sum_b += choose2(x);

    const double expected = sum_a * sum_b / choose2(n);
    const double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) return 1.0;  // degenerate identical partitions
    return (index - expected) / (maximum - expected);
}

double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth);
    const auto [acc, mapping] = clustering_accuracy(pred, truth);
    (void)acc;
    const Compacted p = compact_labels(pred), t = compact_labels(truth);

    std::vector<int> mapped(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        mapped[i] = mapping[static_cast<std::size_t>(p.ids[i])];

    double sum = 0.0;
    for (int cls : t.values) {
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool is_pred = mapped[i] == cls;
            const bool is_true = truth[i] == cls;
            tp += is_pred && is_true;
            fp += is_pred && !is_true;
            fn += !is_pred && is_true;
        }
        if (tp > 0) sum += 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
        // tp == 0 scores 0 for this class
    }
    return sum / static_cast<double>(t.values.size());
}

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
    MetricReport r;
    const Compacted p = compact_labels(pred), t = compact_labels(truth);
    r.contingency = contingency_table(p, t);
    auto [acc, mapping] = clustering_accuracy(pred, truth);
    r.acc = acc;
    r.mapping = std::move(mapping);
    r.nmi = nmi(pred, truth);
    r.ari = ari(pred, truth);
    r.f1 = macro_f1(pred, truth);
    return r;
}

}  // namespace ccgc
