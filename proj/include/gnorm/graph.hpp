#pragma once

// Graph representation, structural matrices, degree features, and the
// synthetic generators used by the spectral and training experiments.
// Feature matrices are d x n with nodes as columns, so H = [h_1 ... h_n].

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace gnorm {

struct Graph {
    std::size_t n = 0;
    // Undirected, 0-indexed, no self-loops, no duplicates (stored with
    // first < second).
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    DenseMatrix node_features;  // d x n; may be empty until features are assigned
    int label = 0;
};

struct GraphBatch {
    std::vector<const Graph*> graphs;
    std::vector<std::size_t> offsets;  // offsets[g] = end column of graph g

    static GraphBatch of(const std::vector<const Graph*>& gs) {
        GraphBatch b;
        b.graphs = gs;
        std::size_t total = 0;
        for (const Graph* g : gs) {
            total += g->n;
            b.offsets.push_back(total);
        }
        return b;
    }

    std::size_t total_nodes() const { return offsets.empty() ? 0 : offsets.back(); }
    std::size_t begin_of(std::size_t g) const { return g == 0 ? 0 : offsets[g - 1]; }
    std::size_t end_of(std::size_t g) const { return offsets[g]; }
    std::size_t size() const { return graphs.size(); }
};

inline void validate_graph(const Graph& g) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [a, b] : g.edges) {
        if (a >= g.n || b >= g.n)
            throw std::invalid_argument("graph: edge endpoint out of range");
        if (a == b) throw std::invalid_argument("graph: self-loop stored");
        auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second)
            throw std::invalid_argument("graph: duplicate undirected edge");
    }
}

inline DenseMatrix adjacency(const Graph& g) {
    DenseMatrix a(g.n, g.n);
    for (auto [i, j] : g.edges) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

inline DenseMatrix degree_matrix(const DenseMatrix& a) {
    DenseMatrix d(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j);
        d(i, i) = s;
    }
    return d;
}

inline std::vector<std::size_t> node_degrees(const Graph& g) {
    std::vector<std::size_t> deg(g.n, 0);
    for (auto [i, j] : g.edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

/// (max_degree+1) x n matrix; column i is the one-hot encoding of deg(v_i).
inline DenseMatrix one_hot_degree_features(const Graph& g, std::size_t max_degree) {
    auto deg = node_degrees(g);
    DenseMatrix f(max_degree + 1, g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        if (deg[i] > max_degree)
            throw std::invalid_argument("one_hot_degree_features: node " +
                                        std::to_string(i) + " has degree " +
                                        std::to_string(deg[i]) + " > max_degree " +
                                        std::to_string(max_degree));
        f(deg[i], i) = 1.0;
    }
    return f;
}

inline Graph make_complete_graph(std::size_t n) {
    if (n < 1) throw std::invalid_argument("make_complete_graph: n must be >= 1");
    Graph g;
    g.n = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
}

inline Graph make_er_graph(std::size_t n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("make_er_graph: p out of [0,1]");
    Rng rng(seed);
    Graph g;
    g.n = n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) g.edges.emplace_back(i, j);
    return g;
}

namespace detail {

/// Deterministic circulant r-regular graph; requires n*r even.
inline Graph circulant_regular(std::size_t n, std::size_t r) {
    Graph g;
    g.n = n;
    std::set<std::pair<std::size_t, std::size_t>> es;
    std::size_t half = r / 2;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 1; k <= half; ++k) {
            std::size_t j = (i + k) % n;
            es.insert(std::minmax(i, j));
        }
    if (r % 2 == 1)  // n is even here; connect antipodal pairs
        for (std::size_t i = 0; i < n / 2; ++i) es.insert({i, i + n / 2});
    g.edges.assign(es.begin(), es.end());
    return g;
}

}  // namespace detail

/// r-regular simple graph via the pairing model with rejection; falls back to
/// the deterministic circulant construction after 1000 failed attempts.
inline Graph make_regular_graph(std::size_t n, std::size_t r, std::uint64_t seed) {
    if (r >= n) throw std::invalid_argument("make_regular_graph: need r < n");
    if ((n * r) % 2 != 0)
        throw std::invalid_argument("make_regular_graph: n*r must be even");
    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::size_t> stubs;
        stubs.reserve(n * r);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < r; ++k) stubs.push_back(i);
        rng.shuffle(stubs);
        std::set<std::pair<std::size_t, std::size_t>> es;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            std::size_t a = stubs[i], b = stubs[i + 1];
            if (a == b || !es.insert(std::minmax(a, b)).second) {
                ok = false;
                break;
            }
        }
        if (ok) {
            Graph g;
            g.n = n;
            g.edges.assign(es.begin(), es.end());
            return g;
        }
    }
    return detail::circulant_regular(n, r);
}

enum class ClassRule { RegularDegree, ErDensity };

/// Two-class synthetic graph set with balanced labels. RegularDegree
/// distinguishes r-regular from (r+1)-regular graphs; ErDensity distinguishes
/// sparse from dense ER graphs. Features are one-hot degree over the shared
/// maximum degree.
inline std::vector<Graph> make_synthetic_classification_set(std::size_t count,
                                                            ClassRule rule,
                                                            std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Graph> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        int label = static_cast<int>(i % 2);
        Graph g;
        if (rule == ClassRule::RegularDegree) {
            // Even node counts keep both degrees feasible.
            std::size_t n = 8 + 2 * rng.below(4);  // 8..14
            std::size_t r = label == 0 ? 2 : 3;
            g = make_regular_graph(n, r, rng.fork_seed());
        } else {
            std::size_t n = 8 + rng.below(8);  // 8..15
            double p = label == 0 ? 0.25 : 0.55;
            g = make_er_graph(n, p, rng.fork_seed());
        }
        g.label = label;
        out.push_back(std::move(g));
    }
    std::size_t max_deg = 0;
    for (const Graph& g : out)
        for (std::size_t d : node_degrees(g)) max_deg = std::max(max_deg, d);
    for (Graph& g : out) g.node_features = one_hot_degree_features(g, max_deg);
    return out;
}

}  // namespace gnorm
