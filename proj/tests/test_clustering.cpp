#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "ccgc/clustering.hpp"
#include "ccgc/rng.hpp"

using namespace ccgc;

namespace {

DenseMatrix random_dense(Rng& rng, std::size_t r, std::size_t c) {
    DenseMatrix m(r, c);
    for (double& x : m.data) x = rng.uniform(-1.0, 1.0);
    return m;
}

// Exhaustive best inertia over all assignments of n points to 2 clusters.
double brute_force_two_cluster_inertia(const DenseMatrix& e) {
    const std::size_t n = e.rows, d = e.cols;
    double best = std::numeric_limits<double>::max();
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<std::vector<std::size_t>> groups(2);
        for (std::size_t i = 0; i < n; ++i) groups[(mask >> i) & 1u].push_back(i);
        double inertia = 0.0;
        for (const auto& g : groups) {
            std::vector<double> center(d, 0.0);
            for (std::size_t i : g)
                for (std::size_t j = 0; j < d; ++j) center[j] += e(i, j);
            for (double& c : center) c /= static_cast<double>(g.size());
            for (std::size_t i : g)
                for (std::size_t j = 0; j < d; ++j) {
                    const double t = e(i, j) - center[j];
                    inertia += t * t;
                }
        }
        best = std::min(best, inertia);
    }
    return best;
}

ViewPair views_from(const DenseMatrix& e1, const DenseMatrix& e2) {
    ViewPair vp;
    vp.e1 = e1;
    vp.e2 = e2;
    return vp;
}

}  // namespace

TEST_CASE("fuse_views") {
    DenseMatrix a(2, 2), b(2, 2);
    a.data = {1, 0, 1, 1};
    b.data = {0, 1, 1, 1};
    const DenseMatrix e = fuse_views(views_from(a, b));
    CHECK(e(0, 0) == 0.5);
    CHECK(e(0, 1) == 0.5);
    CHECK(e(1, 0) == 1.0);

    const DenseMatrix same = fuse_views(views_from(a, a));
    CHECK(same.data == a.data);

    DenseMatrix neg = a;
    for (double& x : neg.data) x = -x;
    for (double x : fuse_views(views_from(a, neg)).data) CHECK(x == 0.0);

    CHECK_THROWS_AS(fuse_views(views_from(a, DenseMatrix(3, 2))), std::invalid_argument);
}

TEST_CASE("kmeans: k=1 and k=N edge cases") {
    Rng rng(1);
    const DenseMatrix e = random_dense(rng, 7, 3);

    const KmeansResult one = kmeans(e, 1, 0);
    for (int a : one.assignments) CHECK(a == 0);
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 7; ++i) mean += e(i, j);
        mean /= 7.0;
        CHECK(one.centers(0, j) == doctest::Approx(mean).epsilon(1e-12));
    }

    const KmeansResult all = kmeans(e, 7, 0);
    CHECK(all.inertia == doctest::Approx(0.0).epsilon(1e-24));
    std::vector<int> sorted = all.assignments;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 7; ++i) CHECK(sorted[i] == static_cast<int>(i));

    CHECK_THROWS_AS(kmeans(e, 8, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(e, 0, 0), std::invalid_argument);
}

TEST_CASE("kmeans recovers two well-separated pairs (brute-force oracle)") {
    DenseMatrix e(4, 2);
    e.data = {0.0, 0.1, 0.1, 0.0, 5.0, 5.1, 5.1, 5.0};
    const KmeansResult r = kmeans(e, 2, 3);
    CHECK(r.assignments[0] == r.assignments[1]);
    CHECK(r.assignments[2] == r.assignments[3]);
    CHECK(r.assignments[0] != r.assignments[2]);
    CHECK(r.inertia == doctest::Approx(brute_force_two_cluster_inertia(e)).epsilon(1e-12));
}

TEST_CASE("kmeans: inertia trace is non-increasing, runs deterministic") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 5 + rng.index(20);
        const DenseMatrix e = random_dense(rng, n, 1 + rng.index(4));
        const int k = 1 + static_cast<int>(rng.index(std::min<std::size_t>(n, 5)));
        const KmeansResult r = kmeans(e, k, trial);
        for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
            CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] + 1e-9);

        const KmeansResult again = kmeans(e, k, trial);
        CHECK(again.assignments == r.assignments);
        CHECK(again.inertia == r.inertia);
    }
}

TEST_CASE("kmeans: duplicate points force empty-cluster repair") {
    DenseMatrix e(4, 2);
    e.data = {0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
    const KmeansResult r = kmeans(e, 3, 0);
    std::vector<int> counts(3, 0);
    for (int a : r.assignments) ++counts[static_cast<std::size_t>(a)];
    for (int c : counts) CHECK(c >= 1);
    CHECK(std::isfinite(r.inertia));
}

TEST_CASE("confidence scores") {
    DenseMatrix e(3, 2);
    e.data = {0.0, 0.0, 1.0, 0.0, 2.0, 0.0};
    KmeansResult km;
    km.assignments = {0, 0, 0};
    km.centers = DenseMatrix(1, 2, 0.0);

    const auto scores = confidence_scores(e, km);
    CHECK(scores[0] == 1.0);                                            // at the center
    CHECK(scores[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12)); // distance 1
    CHECK(scores[2] < scores[1]);                                       // farther, smaller
    for (double s : scores) {
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("high-confidence selection") {
    const std::vector<double> scores{0.9, 0.1, 0.8, 0.2};
    const std::vector<int> one_cluster{0, 0, 0, 0};

    CHECK(select_high_confidence(scores, one_cluster, 1, 1.0) ==
          std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(select_high_confidence(scores, one_cluster, 1, 0.5) ==
          std::vector<std::size_t>{0, 2});

    const std::vector<double> equal{0.5, 0.5, 0.5, 0.5};
    CHECK(select_high_confidence(equal, one_cluster, 1, 0.5) ==
          std::vector<std::size_t>{0, 1});  // ties broken by lower index

    CHECK_THROWS_AS(select_high_confidence(scores, one_cluster, 1, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(select_high_confidence(scores, one_cluster, 1, 1.5),
                    std::invalid_argument);
}

TEST_CASE("selection keeps every cluster alive") {
    // cluster 1's best score is below the global top-2 cut
    const std::vector<double> scores{0.9, 0.8, 0.3, 0.2};
    const std::vector<int> assignments{0, 0, 1, 1};
    const auto h = select_high_confidence(scores, assignments, 2, 0.5);
    CHECK(h == std::vector<std::size_t>{0, 1, 2});  // node 2 force-included
}

TEST_CASE("selection size is non-decreasing in tau") {
    Rng rng(11);
    std::vector<double> scores(40);
    std::vector<int> assignments(40);
    for (std::size_t i = 0; i < 40; ++i) {
        scores[i] = rng.uniform();
        assignments[i] = static_cast<int>(rng.index(3));
    }
    std::size_t prev = 0;
    for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        const auto h = select_high_confidence(scores, assignments, 3, tau);
        CHECK(h.size() >= prev);
        prev = h.size();
    }
}

TEST_CASE("contrast batch: grouping, alignment, centers") {
    Rng rng(2);
    DenseMatrix e1(4, 2), e2(4, 2);
    e1.data = {1, 0, 0, 1, 1, 0, 0, 1};
    e2.data = {0, 1, 1, 0, 0, 1, 1, 0};

    ClusterState st;
    st.km.assignments = {0, 0, 1, 1};
    st.km.centers = DenseMatrix(2, 2, 0.0);
    st.high_conf = {0, 1, 2, 3};
    st.tau = 1.0;

    const ContrastBatch b = build_contrast_batch(views_from(e1, e2), st);
    CHECK(b.k == 2);
    CHECK(b.selected() == 4);
    CHECK(b.cluster_nodes[0] == std::vector<std::size_t>{0, 1});
    CHECK(b.cluster_nodes[1] == std::vector<std::size_t>{2, 3});
    CHECK(b.cen1(0, 0) == doctest::Approx(0.5));
    CHECK(b.cen1(0, 1) == doctest::Approx(0.5));
    CHECK(b.cen2(1, 0) == doctest::Approx(0.5));

    // identical views give identical centers
    const ContrastBatch same = build_contrast_batch(views_from(e1, e1), st);
    CHECK(same.cen1.data == same.cen2.data);

    // single cluster: the center is the mean row of the whole selection
    ClusterState single;
    single.km.assignments = {0, 0, 0, 0};
    single.km.centers = DenseMatrix(1, 2, 0.0);
    single.high_conf = {0, 1, 2, 3};
    const ContrastBatch sb = build_contrast_batch(views_from(e1, e2), single);
    CHECK(sb.cen1(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("make_cluster_state: blocks partition the selection") {
    Rng rng(7);
    const DenseMatrix fused = random_dense(rng, 25, 3);
    const ClusterState st = make_cluster_state(fused, 3, 13, 0.6);
    CHECK(st.high_conf.size() >= 15);  // ceil(0.6*25)

    ViewPair vp;
    vp.e1 = random_dense(rng, 25, 3);
    vp.e2 = random_dense(rng, 25, 3);
    const ContrastBatch b = build_contrast_batch(vp, st);
    CHECK(b.selected() == st.high_conf.size());

    std::vector<std::size_t> all;
    for (const auto& g : b.cluster_nodes) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    CHECK(all == st.high_conf);

    // tau = 1 reproduces whole-dataset grouping
    const ClusterState full = make_cluster_state(fused, 3, 13, 1.0);
    CHECK(full.high_conf.size() == 25);
}
