#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "ccgc/graph.hpp"

using namespace ccgc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    f << content;
}

}  // namespace

TEST_CASE("load: triangle bundle with dedup and self-loop drop") {
    TempDir dir("ccgc_graph_tri");
    write_file(dir.path / "features.csv", "1.0,0.0\n0.0,1.0\n1.0,1.0\n");
    write_file(dir.path / "edges.tsv", "0\t1\n1\t0\n1\t2\n2\t0\n2\t2\n");
    write_file(dir.path / "labels.txt", "0\n1\n1\n");

    LoadInfo info;
    const GraphDataset d = load_dataset(dir.path.string(), &info);
    CHECK(d.num_nodes() == 3);
    CHECK(d.num_features() == 2);
    CHECK(d.num_classes == 2);
    CHECK(d.edges.size() == 3);
    CHECK(info.dropped_self_loops == 1);
    CHECK(info.deduplicated_edges == 1);

    // canonical: min-id first, sorted
    CHECK(d.edges[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(d.edges[1] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(d.edges[2] == std::pair<std::size_t, std::size_t>{1, 2});

    const DatasetStats s = dataset_stats(d);
    CHECK(s.edges == 3);
    CHECK(s.class_histogram == std::vector<std::size_t>{1, 2});
}

TEST_CASE("load: error paths") {
    TempDir dir("ccgc_graph_err");
    CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                         doctest::Contains("missing file"), std::runtime_error);

    write_file(dir.path / "features.csv", "1.0,2.0\n3.0,oops\n");
    write_file(dir.path / "edges.tsv", "");
    write_file(dir.path / "meta.json", R"({"num_classes": 2})");
    CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                         doctest::Contains("row 2, column 2"), std::runtime_error);

    write_file(dir.path / "features.csv", "1.0,2.0\n3.0,4.0\n");
    write_file(dir.path / "edges.tsv", "0\t5\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                         doctest::Contains("out of range"), std::runtime_error);

    write_file(dir.path / "edges.tsv", "0\t1\n");
    write_file(dir.path / "labels.txt", "0\n7\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                         doctest::Contains("outside [0, 2)"), std::runtime_error);
}

TEST_CASE("load: class count comes from meta.json when unlabeled") {
    TempDir dir("ccgc_graph_meta");
    write_file(dir.path / "features.csv", "1.0\n2.0\n");
    write_file(dir.path / "edges.tsv", "0\t1\n");
    CHECK_THROWS_WITH_AS(load_dataset(dir.path.string()),
                         doctest::Contains("class count unknown"), std::runtime_error);

    write_file(dir.path / "meta.json", R"({"num_classes": 3, "name": "tiny"})");
    const GraphDataset d = load_dataset(dir.path.string());
    CHECK(d.num_classes == 3);
    CHECK(d.name == "tiny");
    CHECK_FALSE(d.has_labels());
}

TEST_CASE("save/load round trip is a fixed point") {
    const GraphDataset d = make_sbm(42, {4, 5}, 0.8, 0.2, 6, 0.25);
    TempDir dir("ccgc_graph_rt");
    save_dataset(d, dir.path.string());
    const GraphDataset d1 = load_dataset(dir.path.string());
    TempDir dir2("ccgc_graph_rt2");
    save_dataset(d1, dir2.path.string());
    const GraphDataset d2 = load_dataset(dir2.path.string());

    CHECK(d1.edges == d.edges);
    CHECK(d2.edges == d1.edges);
    CHECK(d2.labels == d1.labels);
    CHECK(d2.num_classes == d1.num_classes);
    CHECK(d2.features.data == d1.features.data);
}

TEST_CASE("load tolerates CRLF line endings") {
    TempDir dir("ccgc_graph_crlf");
    write_file(dir.path / "features.csv", "1.0,2.0\r\n3.0,4.0\r\n");
    write_file(dir.path / "edges.tsv", "0\t1\r\n");
    write_file(dir.path / "labels.txt", "0\r\n1\r\n");
    const GraphDataset d = load_dataset(dir.path.string());
    CHECK(d.num_nodes() == 2);
    CHECK(d.features(1, 1) == 4.0);
    CHECK(d.edges.size() == 1);
    CHECK(d.labels == std::vector<int>{0, 1});
}

TEST_CASE("stats: empty edge set") {
    TempDir dir("ccgc_graph_empty");
    write_file(dir.path / "features.csv", "1.0\n2.0\n");
    write_file(dir.path / "edges.tsv", "");
    write_file(dir.path / "labels.txt", "0\n1\n");
    const GraphDataset d = load_dataset(dir.path.string());
    CHECK(dataset_stats(d).edges == 0);
}

TEST_CASE("make_sbm deterministic extremes") {
    const GraphDataset two = make_sbm(1, {3, 3}, 1.0, 0.0, 4, 0.0);
    CHECK(two.num_nodes() == 6);
    CHECK(two.edges.size() == 6);  // two disjoint triangles
    for (const auto& [u, v] : two.edges) CHECK(two.labels[u] == two.labels[v]);
    CHECK(two.labels == std::vector<int>{0, 0, 0, 1, 1, 1});

    const GraphDataset none = make_sbm(1, {3, 3}, 0.0, 0.0, 4, 0.1);
    CHECK(none.edges.empty());

    const GraphDataset a = make_sbm(9, {5, 5}, 0.5, 0.1, 8, 0.3);
    const GraphDataset b = make_sbm(9, {5, 5}, 0.5, 0.1, 8, 0.3);
    CHECK(a.edges == b.edges);
    CHECK(a.features.data == b.features.data);

    CHECK_THROWS_AS(make_sbm(1, {3}, 1.5, 0.0, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_sbm(1, {3}, 0.5, -0.1, 2, 0.0), std::invalid_argument);
}
