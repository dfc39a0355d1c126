#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <gnorm/dataset_io.hpp>

using namespace gnorm;
namespace fs = std::filesystem;

namespace {

// Two-graph fixture: a triangle (label 1) and a single edge (label -1), in the
// standard TUDataset text layout with 1-indexed global node ids.
fs::path write_fixture(bool with_node_labels) {
    fs::path dir = fs::temp_directory_path() /
                   (with_node_labels ? "tud_fixture_nl" : "tud_fixture");
    fs::create_directories(dir);
    std::ofstream(dir / "FIX_A.txt") << "1, 2\n2, 1\n1, 3\n3, 1\n2, 3\n3, 2\n"
                                     << "4, 5\n5, 4\n";
    std::ofstream(dir / "FIX_graph_indicator.txt") << "1\n1\n1\n2\n2\n";
    std::ofstream(dir / "FIX_graph_labels.txt") << "1\n-1\n";
    if (with_node_labels)
        std::ofstream(dir / "FIX_node_labels.txt") << "0\n1\n0\n2\n2\n";
    else
        fs::remove(dir / "FIX_node_labels.txt");
    return dir;
}

}  // namespace

TEST_CASE("fixture parses into two graphs with remapped labels") {
    fs::path dir = write_fixture(false);
    auto [graphs, meta] = parse_tudataset(dir, "FIX");
    REQUIRE(graphs.size() == 2);
    CHECK(graphs[0].n == 3);
    CHECK(graphs[0].edges.size() == 3);  // directed pairs collapsed
    CHECK(graphs[1].n == 2);
    CHECK(graphs[1].edges.size() == 1);
    CHECK(graphs[0].label == 1);   // raw 1 -> class 1 (after -1 -> 0)
    CHECK(graphs[1].label == 0);   // raw -1 -> class 0
    CHECK(meta.num_graphs == 2);
    CHECK(meta.num_classes == 2);
    CHECK(meta.avg_nodes == doctest::Approx(2.5));
    validate_graph(graphs[0]);
    validate_graph(graphs[1]);
    // No node labels: one-hot degree features over the dataset max degree (2).
    CHECK(graphs[0].node_features.rows() == 3);
    CHECK(graphs[0].node_features(2, 0) == 1.0);
    CHECK(graphs[1].node_features(1, 0) == 1.0);
}

TEST_CASE("node labels become one-hot features when present") {
    fs::path dir = write_fixture(true);
    auto [graphs, meta] = parse_tudataset(dir, "FIX");
    REQUIRE(graphs.size() == 2);
    CHECK(graphs[0].node_features.rows() == 3);  // labels {0,1,2}
    CHECK(graphs[0].node_features(0, 0) == 1.0);
    CHECK(graphs[0].node_features(1, 1) == 1.0);
    CHECK(graphs[1].node_features(2, 0) == 1.0);
    CHECK(graphs[1].node_features(2, 1) == 1.0);
}

TEST_CASE("re-parsing is deterministic") {
    fs::path dir = write_fixture(false);
    auto [a, ma] = parse_tudataset(dir, "FIX");
    auto [b, mb] = parse_tudataset(dir, "FIX");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].edges == b[i].edges);
        CHECK(a[i].label == b[i].label);
        CHECK(a[i].node_features.data() == b[i].node_features.data());
    }
}

TEST_CASE("missing files and malformed rows are reported with context") {
    fs::path dir = fs::temp_directory_path() / "tud_broken";
    fs::create_directories(dir);
    fs::remove(dir / "BRK_graph_indicator.txt");
    CHECK_THROWS_WITH_AS(parse_tudataset(dir, "BRK"),
                         doctest::Contains("missing file"), std::runtime_error);

    std::ofstream(dir / "BRK_graph_indicator.txt") << "1\n1\n2\n2\n";
    std::ofstream(dir / "BRK_graph_labels.txt") << "0\n1\n";
    std::ofstream(dir / "BRK_A.txt") << "1, 3\n";  // crosses graph boundary
    CHECK_THROWS_WITH_AS(parse_tudataset(dir, "BRK"),
                         doctest::Contains("crosses graph boundary"),
                         std::runtime_error);

    std::ofstream(dir / "BRK_A.txt") << "1, x\n";
    CHECK_THROWS_WITH_AS(parse_tudataset(dir, "BRK"),
                         doctest::Contains("non-integer token"), std::runtime_error);

    std::ofstream(dir / "BRK_A.txt") << "1, 9\n";
    CHECK_THROWS_WITH_AS(parse_tudataset(dir, "BRK"),
                         doctest::Contains("out of range"), std::runtime_error);
}

TEST_CASE("self-loops are dropped and duplicate edges collapse") {
    fs::path dir = fs::temp_directory_path() / "tud_loops";
    fs::create_directories(dir);
    std::ofstream(dir / "LP_A.txt") << "1, 1\n1, 2\n2, 1\n1, 2\n";
    std::ofstream(dir / "LP_graph_indicator.txt") << "1\n1\n";
    std::ofstream(dir / "LP_graph_labels.txt") << "0\n";
    auto [graphs, meta] = parse_tudataset(dir, "LP");
    REQUIRE(graphs.size() == 1);
    CHECK(graphs[0].edges.size() == 1);
}

TEST_CASE("stratified folds cover every sample once with balanced classes") {
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) labels.push_back(i < 30 ? 0 : 1);
    auto folds = stratified_folds(labels, 10, 7);
    REQUIRE(folds.size() == 10);
    std::vector<int> seen(labels.size(), 0);
    for (const auto& f : folds) {
        CHECK(f.test_ids.size() == 5);
        CHECK(f.train_ids.size() == 45);
        int c0 = 0, c1 = 0;
        for (std::size_t id : f.test_ids) {
            ++seen[id];
            (labels[id] == 0 ? c0 : c1)++;
        }
        // Global ratio 30:20 means 3:2 per fold of 5.
        CHECK(c0 == 3);
        CHECK(c1 == 2);
        // Train/test disjoint.
        std::set<std::size_t> ts(f.test_ids.begin(), f.test_ids.end());
        for (std::size_t id : f.train_ids) CHECK(ts.count(id) == 0);
    }
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("ten balanced samples with k=10 test one sample each") {
    std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    auto folds = stratified_folds(labels, 5, 3);
    for (const auto& f : folds) CHECK(f.test_ids.size() == 2);
}

TEST_CASE("fold errors and seed behavior") {
    std::vector<int> one_class(20, 0);
    CHECK_THROWS_AS(stratified_folds(one_class, 10, 1), std::invalid_argument);

    std::vector<int> tiny{0, 0, 0, 1, 1};
    CHECK_THROWS_WITH_AS(stratified_folds(tiny, 3, 1), doctest::Contains("class 1"),
                         std::invalid_argument);

    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 2);
    auto a = stratified_folds(labels, 10, 5);
    auto b = stratified_folds(labels, 10, 5);
    auto c = stratified_folds(labels, 10, 6);
    bool same = true, diff = false;
    for (std::size_t f = 0; f < 10; ++f) {
        same = same && a[f].test_ids == b[f].test_ids;
        diff = diff || a[f].test_ids != c[f].test_ids;
    }
    CHECK(same);
    CHECK(diff);
}
