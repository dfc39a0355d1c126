#pragma once

// TUDataset text-format parsing and seeded stratified fold splitting.
// The tokenizer is whitespace-and-comma tolerant; strictness lives in the
// count consistency checks.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"

namespace gnorm {

struct DatasetMeta {
    std::string name;
    std::size_t num_graphs = 0;
    std::size_t num_classes = 0;
    double avg_nodes = 0.0;
};

struct FoldSplit {
    std::size_t fold_index = 0;
    std::vector<std::size_t> train_ids;
    std::vector<std::size_t> test_ids;
};

namespace detail {

inline std::vector<long> parse_int_line(const std::string& line, const std::string& file,
                                        std::size_t lineno) {
    std::vector<long> out;
    std::string tok;
    auto flush = [&]() {
        if (tok.empty()) return;
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw std::runtime_error(file + ":" + std::to_string(lineno) +
                                     ": non-integer token '" + tok + "'");
        out.push_back(v);
        tok.clear();
    };
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r')
            flush();
        else
            tok.push_back(c);
    }
    flush();
    return out;
}

inline std::vector<std::vector<long>> read_int_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing file: " + p.string());
    std::vector<std::vector<long>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto vals = parse_int_line(line, p.filename().string(), lineno);
        if (!vals.empty()) rows.push_back(std::move(vals));
    }
    return rows;
}

}  // namespace detail

/// Parses NAME_A.txt / NAME_graph_indicator.txt / NAME_graph_labels.txt
/// (NAME_node_labels.txt optional) under `directory`. Edges are 1-indexed
/// directed pairs collapsed to undirected; node labels become one-hot
/// features, otherwise one-hot degree features; labels remap to 0..C-1.
inline std::pair<std::vector<Graph>, DatasetMeta> parse_tudataset(
    const std::filesystem::path& directory, const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path a_file = directory / (name + "_A.txt");
    const fs::path ind_file = directory / (name + "_graph_indicator.txt");
    const fs::path lab_file = directory / (name + "_graph_labels.txt");
    const fs::path nlab_file = directory / (name + "_node_labels.txt");

    auto indicator_rows = detail::read_int_file(ind_file);
    std::vector<long> indicator;
    for (const auto& r : indicator_rows)
        for (long v : r) indicator.push_back(v);
    const std::size_t total_nodes = indicator.size();
    if (total_nodes == 0) throw std::runtime_error(ind_file.string() + ": empty");

    long num_graphs = *std::max_element(indicator.begin(), indicator.end());
    std::vector<Graph> graphs(static_cast<std::size_t>(num_graphs));
    // Map global node id (0-indexed) -> (graph, local id).
    std::vector<std::size_t> node_graph(total_nodes), node_local(total_nodes);
    for (std::size_t i = 0; i < total_nodes; ++i) {
        long gi = indicator[i];
        if (gi < 1 || gi > num_graphs)
            throw std::runtime_error(ind_file.string() + ":" + std::to_string(i + 1) +
                                     ": graph id " + std::to_string(gi) + " out of range");
        std::size_t gidx = static_cast<std::size_t>(gi - 1);
        node_graph[i] = gidx;
        node_local[i] = graphs[gidx].n++;
    }

    auto edge_rows = detail::read_int_file(a_file);
    std::vector<std::set<std::pair<std::size_t, std::size_t>>> edge_sets(graphs.size());
    std::size_t lineno = 0;
    for (const auto& row : edge_rows) {
        ++lineno;
        if (row.size() != 2)
            throw std::runtime_error(a_file.string() + ":" + std::to_string(lineno) +
                                     ": expected an 'i, j' pair");
        long u1 = row[0], v1 = row[1];
        if (u1 < 1 || v1 < 1 || u1 > static_cast<long>(total_nodes) ||
            v1 > static_cast<long>(total_nodes))
            throw std::runtime_error(a_file.string() + ":" + std::to_string(lineno) +
                                     ": node id out of range");
        std::size_t u = static_cast<std::size_t>(u1 - 1);
        std::size_t v = static_cast<std::size_t>(v1 - 1);
        if (node_graph[u] != node_graph[v])
            throw std::runtime_error(a_file.string() + ":" + std::to_string(lineno) +
                                     ": edge crosses graph boundary");
        if (u == v) continue;  // drop self-loops; Ahat re-adds them
        auto key = std::minmax(node_local[u], node_local[v]);
        edge_sets[node_graph[u]].insert({key.first, key.second});
    }
    for (std::size_t g = 0; g < graphs.size(); ++g)
        graphs[g].edges.assign(edge_sets[g].begin(), edge_sets[g].end());

    auto label_rows = detail::read_int_file(lab_file);
    std::vector<long> raw_labels;
    for (const auto& r : label_rows)
        for (long v : r) raw_labels.push_back(v);
    if (raw_labels.size() != graphs.size())
        throw std::runtime_error(lab_file.string() + ": " + std::to_string(raw_labels.size()) +
                                 " labels for " + std::to_string(graphs.size()) + " graphs");
    std::set<long> distinct(raw_labels.begin(), raw_labels.end());
    std::map<long, int> remap;
    int next = 0;
    for (long v : distinct) remap[v] = next++;
    for (std::size_t g = 0; g < graphs.size(); ++g) graphs[g].label = remap[raw_labels[g]];

    // Features: node labels one-hot if present, else one-hot degree.
    if (fs::exists(nlab_file)) {
        auto nlab_rows = detail::read_int_file(nlab_file);
        std::vector<long> nlabs;
        for (const auto& r : nlab_rows)
            for (long v : r) nlabs.push_back(v);
        if (nlabs.size() != total_nodes)
            throw std::runtime_error(nlab_file.string() + ": " + std::to_string(nlabs.size()) +
                                     " node labels for " + std::to_string(total_nodes) +
                                     " nodes");
        std::set<long> nset(nlabs.begin(), nlabs.end());
        std::map<long, std::size_t> nmap;
        std::size_t ni = 0;
        for (long v : nset) nmap[v] = ni++;
        for (Graph& g : graphs) g.node_features = DenseMatrix(nset.size(), g.n);
        for (std::size_t i = 0; i < total_nodes; ++i)
            graphs[node_graph[i]].node_features(nmap[nlabs[i]], node_local[i]) = 1.0;
    } else {
        std::size_t max_deg = 0;
        for (const Graph& g : graphs)
            for (std::size_t d : node_degrees(g)) max_deg = std::max(max_deg, d);
        for (Graph& g : graphs) g.node_features = one_hot_degree_features(g, max_deg);
    }

    DatasetMeta meta;
    meta.name = name;
    meta.num_graphs = graphs.size();
    meta.num_classes = distinct.size();
    meta.avg_nodes = static_cast<double>(total_nodes) / static_cast<double>(graphs.size());
    return {std::move(graphs), meta};
}

/// Seeded stratified k-fold split: shuffle within each class, round-robin to
/// folds. Every class must have at least k members.
inline std::vector<FoldSplit> stratified_folds(const std::vector<int>& labels,
                                               std::size_t k, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2)
        throw std::invalid_argument("stratified_folds: need at least 2 classes");
    for (const auto& [cls, ids] : by_class)
        if (ids.size() < k)
            throw std::invalid_argument("stratified_folds: class " + std::to_string(cls) +
                                        " has only " + std::to_string(ids.size()) +
                                        " samples for k=" + std::to_string(k));
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> fold_test(k);
    for (auto& [cls, ids] : by_class) {
        rng.shuffle(ids);
        for (std::size_t i = 0; i < ids.size(); ++i) fold_test[i % k].push_back(ids[i]);
    }
    std::vector<FoldSplit> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].fold_index = f;
        std::sort(fold_test[f].begin(), fold_test[f].end());
        folds[f].test_ids = fold_test[f];
        std::set<std::size_t> test_set(fold_test[f].begin(), fold_test[f].end());
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!test_set.count(i)) folds[f].train_ids.push_back(i);
    }
    return folds;
}

}  // namespace gnorm
