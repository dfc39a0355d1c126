#pragma once

// Minimal trainable GIN/GCN with analytic backpropagation. Layer k computes
// F(Norm(W H Q)) where F is ReLU (GCN) or a small MLP (GIN); normalization is
// applied after the aggregation product and, for GIN, after each linear map
// inside the MLP (norm_once collapses that to a single site per layer).
// Gradients flow through every normalization statistic, the learnable shift
// alpha, and the GIN self-weight xi.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "linalg.hpp"
#include "norm.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace gnorm {

enum class Arch { GIN, GCN };
enum class Readout { Sum, Mean };

struct ModelConfig {
    Arch arch = Arch::GIN;
    std::size_t layers = 5;
    std::size_t hidden_dim = 64;
    std::size_t mlp_depth = 2;
    NormKind norm = NormKind::Graph;
    Readout readout = Readout::Sum;
    bool xi_learnable = true;
    std::size_t classes = 2;
    std::size_t input_dim = 0;
    bool residual = false;
    bool norm_once = false;
    double eps = 1e-5;

    std::size_t norm_sites_per_layer() const {
        if (norm == NormKind::None) return 0;
        if (arch == Arch::GCN || norm_once) return 1;
        return 1 + mlp_depth;
    }
};

struct NormParams {
    std::vector<double> gamma, beta, alpha;  // alpha used only for GraphNorm
};

struct LayerParams {
    DenseMatrix w;  // hidden x in_dim
    std::vector<DenseMatrix> mlp_w;
    std::vector<std::vector<double>> mlp_b;
    std::vector<NormParams> norms;
    double xi = 0.0;  // GIN self-loop weight
};

struct ModelParams {
    std::vector<LayerParams> layers;
    DenseMatrix head_w;
    std::vector<double> head_b;
};

/// BatchNorm running statistics, one per norm site; unused for other kinds.
struct ModelState {
    std::vector<std::vector<BatchNormState>> bn;  // [layer][site]

    static ModelState make(const ModelConfig& cfg) {
        ModelState s;
        s.bn.assign(cfg.layers,
                    std::vector<BatchNormState>(cfg.norm_sites_per_layer(),
                                                BatchNormState::make(cfg.hidden_dim)));
        return s;
    }
};

inline ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    if (cfg.layers < 1 || cfg.hidden_dim < 1 || cfg.input_dim < 1)
        throw std::invalid_argument("init_params: invalid model dimensions");
    Rng rng(seed);
    auto uniform_matrix = [&](std::size_t r, std::size_t c) {
        DenseMatrix m(r, c);
        double bound = 1.0 / std::sqrt(static_cast<double>(c));
        for (double& v : m.data()) v = rng.uniform(-bound, bound);
        return m;
    };
    ModelParams p;
    for (std::size_t k = 0; k < cfg.layers; ++k) {
        LayerParams lp;
        lp.w = uniform_matrix(cfg.hidden_dim, k == 0 ? cfg.input_dim : cfg.hidden_dim);
        if (cfg.arch == Arch::GIN) {
            for (std::size_t s = 0; s < cfg.mlp_depth; ++s) {
                lp.mlp_w.push_back(uniform_matrix(cfg.hidden_dim, cfg.hidden_dim));
                lp.mlp_b.emplace_back(cfg.hidden_dim, 0.0);
            }
        }
        for (std::size_t s = 0; s < cfg.norm_sites_per_layer(); ++s) {
            NormParams np;
            np.gamma.assign(cfg.hidden_dim, 1.0);
            np.beta.assign(cfg.hidden_dim, 0.0);
            if (cfg.norm == NormKind::Graph) np.alpha.assign(cfg.hidden_dim, 1.0);
            lp.norms.push_back(std::move(np));
        }
        lp.xi = 0.0;
        p.layers.push_back(std::move(lp));
    }
    p.head_w = uniform_matrix(cfg.classes, cfg.hidden_dim);
    p.head_b.assign(cfg.classes, 0.0);
    return p;
}

/// Same shapes as `like`, all zeros; used for gradients and Adam moments.
inline ModelParams zeros_like(const ModelParams& like) {
    ModelParams z = like;
    for (auto& lp : z.layers) {
        for (double& v : lp.w.data()) v = 0.0;
        for (auto& m : lp.mlp_w)
            for (double& v : m.data()) v = 0.0;
        for (auto& b : lp.mlp_b) std::fill(b.begin(), b.end(), 0.0);
        for (auto& np : lp.norms) {
            std::fill(np.gamma.begin(), np.gamma.end(), 0.0);
            std::fill(np.beta.begin(), np.beta.end(), 0.0);
            std::fill(np.alpha.begin(), np.alpha.end(), 0.0);
        }
        lp.xi = 0.0;
    }
    for (double& v : z.head_w.data()) v = 0.0;
    std::fill(z.head_b.begin(), z.head_b.end(), 0.0);
    return z;
}

/// Visits every trainable coordinate as (name, pointer, length) spans.
/// xi is visited only when the config marks it learnable.
inline void visit_params(ModelParams& p, const ModelConfig& cfg,
                         const std::function<void(const std::string&, double*,
                                                  std::size_t)>& fn) {
    for (std::size_t k = 0; k < p.layers.size(); ++k) {
        auto& lp = p.layers[k];
        std::string pre = "layer" + std::to_string(k) + ".";
        fn(pre + "w", lp.w.data().data(), lp.w.data().size());
        for (std::size_t s = 0; s < lp.mlp_w.size(); ++s) {
            fn(pre + "mlp_w" + std::to_string(s), lp.mlp_w[s].data().data(),
               lp.mlp_w[s].data().size());
            fn(pre + "mlp_b" + std::to_string(s), lp.mlp_b[s].data(), lp.mlp_b[s].size());
        }
        for (std::size_t s = 0; s < lp.norms.size(); ++s) {
            auto& np = lp.norms[s];
            std::string npre = pre + "norm" + std::to_string(s) + ".";
            fn(npre + "gamma", np.gamma.data(), np.gamma.size());
            fn(npre + "beta", np.beta.data(), np.beta.size());
            if (!np.alpha.empty()) fn(npre + "alpha", np.alpha.data(), np.alpha.size());
        }
        if (cfg.arch == Arch::GIN && cfg.xi_learnable) fn(pre + "xi", &lp.xi, 1);
    }
    fn("head_w", p.head_w.data().data(), p.head_w.data().size());
    fn("head_b", p.head_b.data(), p.head_b.size());
}

struct LayerCache {
    DenseMatrix h_in;
    std::vector<DenseMatrix> q;  // per graph
    DenseMatrix u;               // aggregated input
    DenseMatrix p;               // W u
    std::vector<NormCache> norm_caches;
    std::vector<DenseMatrix> mlp_inputs;   // input to each MLP linear
    std::vector<DenseMatrix> relu_inputs;  // pre-activation fed to each ReLU
    DenseMatrix h_out;
};

struct ForwardCache {
    std::vector<std::size_t> offsets;
    std::vector<LayerCache> layers;
    DenseMatrix readout;  // hidden x b
    DenseMatrix logits;   // classes x b
};

namespace detail {

inline NormSpec site_spec(const ModelConfig& cfg, const NormParams& np) {
    NormSpec spec;
    spec.kind = cfg.norm;
    spec.epsilon = cfg.eps;
    spec.gamma = np.gamma;
    spec.beta = np.beta;
    spec.alpha = np.alpha;
    return spec;
}

inline void check_finite(const DenseMatrix& m, std::size_t layer, const char* what) {
    for (double v : m.data())
        if (!std::isfinite(v))
            throw std::runtime_error(std::string("forward: non-finite ") + what +
                                     " at layer " + std::to_string(layer));
}

inline DenseMatrix relu(const DenseMatrix& x) {
    DenseMatrix y = x;
    for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
    return y;
}

inline DenseMatrix relu_backward(const DenseMatrix& dy, const DenseMatrix& pre) {
    DenseMatrix dx = dy;
    for (std::size_t i = 0; i < dx.data().size(); ++i)
        if (pre.data()[i] <= 0.0) dx.data()[i] = 0.0;
    return dx;
}

inline DenseMatrix add_bias(const DenseMatrix& x, const std::vector<double>& b) {
    DenseMatrix y = x;
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c) y(i, c) += b[i];
    return y;
}

}  // namespace detail

/// Forward pass over a block-diagonal batch. Returns per-graph logits
/// (classes x b); `cache` is required for backward, `state` only for
/// BatchNorm.
inline DenseMatrix forward(const ModelParams& params, const ModelConfig& cfg,
                           const GraphBatch& batch, NormMode mode,
                           ModelState* state = nullptr,
                           ForwardCache* cache = nullptr) {
    if (batch.size() == 0) throw std::invalid_argument("forward: empty batch");
    const std::size_t total = batch.total_nodes();

    DenseMatrix h(cfg.input_dim, total);
    for (std::size_t g = 0; g < batch.size(); ++g) {
        const Graph& gr = *batch.graphs[g];
        if (gr.node_features.rows() != cfg.input_dim)
            throw std::invalid_argument("forward: graph feature dim " +
                                        std::to_string(gr.node_features.rows()) +
                                        " != config input_dim " +
                                        std::to_string(cfg.input_dim));
        std::size_t c0 = batch.begin_of(g);
        for (std::size_t j = 0; j < cfg.input_dim; ++j)
            for (std::size_t c = 0; c < gr.n; ++c)
                h(j, c0 + c) = gr.node_features(j, c);
    }

    if (cache) {
        cache->offsets = batch.offsets;
        cache->layers.assign(cfg.layers, {});
    }

    for (std::size_t k = 0; k < cfg.layers; ++k) {
        const LayerParams& lp = params.layers[k];
        LayerCache local;
        LayerCache& lc = cache ? cache->layers[k] : local;
        lc.h_in = h;

        // Per-graph aggregation H Q_g.
        DenseMatrix u(h.rows(), total);
        lc.q.clear();
        for (std::size_t g = 0; g < batch.size(); ++g) {
            const Graph& gr = *batch.graphs[g];
            DenseMatrix a = adjacency(gr);
            DenseMatrix q = cfg.arch == Arch::GCN ? q_gcn(a) : q_gin(a, lp.xi);
            std::size_t c0 = batch.begin_of(g);
            for (std::size_t i = 0; i < h.rows(); ++i)
                for (std::size_t c = 0; c < gr.n; ++c) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < gr.n; ++l)
                        acc += h(i, c0 + l) * q(l, c);
                    u(i, c0 + c) = acc;
                }
            lc.q.push_back(std::move(q));
        }
        lc.u = u;

        DenseMatrix p = matmul(lp.w, u);
        lc.p = p;
        detail::check_finite(p, k, "pre-norm activation");

        lc.norm_caches.clear();
        lc.mlp_inputs.clear();
        lc.relu_inputs.clear();
        const bool has_norm = cfg.norm != NormKind::None;
        auto norm_at = [&](const DenseMatrix& x, std::size_t site) {
            if (!has_norm) return x;
            NormSpec spec = detail::site_spec(cfg, lp.norms[site]);
            BatchNormState* bns =
                cfg.norm == NormKind::Batch && state ? &state->bn[k][site] : nullptr;
            lc.norm_caches.emplace_back();
            return normalize(x, batch.offsets, spec, bns, mode, &lc.norm_caches.back());
        };

        DenseMatrix cur = norm_at(p, 0);
        if (cfg.arch == Arch::GCN) {
            lc.relu_inputs.push_back(cur);
            cur = detail::relu(cur);
        } else {
            for (std::size_t s = 0; s < cfg.mlp_depth; ++s) {
                lc.mlp_inputs.push_back(cur);
                DenseMatrix t = detail::add_bias(matmul(lp.mlp_w[s], cur), lp.mlp_b[s]);
                if (has_norm && !cfg.norm_once) t = norm_at(t, s + 1);
                lc.relu_inputs.push_back(t);
                cur = detail::relu(t);
            }
        }

        if (cfg.residual && lc.h_in.rows() == cur.rows()) cur = add(cur, lc.h_in);
        detail::check_finite(cur, k, "activation");
        lc.h_out = cur;
        h = cur;
    }

    // Readout per graph, then linear head.
    DenseMatrix r(cfg.hidden_dim, batch.size());
    for (std::size_t g = 0; g < batch.size(); ++g) {
        std::size_t c0 = batch.begin_of(g), c1 = batch.end_of(g);
        double scale = cfg.readout == Readout::Mean
                           ? 1.0 / static_cast<double>(c1 - c0)
                           : 1.0;
        for (std::size_t i = 0; i < cfg.hidden_dim; ++i) {
            double acc = 0.0;
            for (std::size_t c = c0; c < c1; ++c) acc += h(i, c);
            r(i, g) = acc * scale;
        }
    }
    DenseMatrix logits = detail::add_bias(matmul(params.head_w, r), params.head_b);
    if (cache) {
        cache->readout = r;
        cache->logits = logits;
    }
    return logits;
}

/// Mean softmax cross-entropy over the batch; also returns the logit
/// gradient for backward.
inline double cross_entropy(const DenseMatrix& logits, const std::vector<int>& labels,
                            DenseMatrix* dlogits = nullptr) {
    const std::size_t b = logits.cols();
    if (labels.size() != b)
        throw std::invalid_argument("cross_entropy: label count mismatch");
    double loss = 0.0;
    if (dlogits) *dlogits = DenseMatrix(logits.rows(), b);
    for (std::size_t g = 0; g < b; ++g) {
        double mx = logits(0, g);
        for (std::size_t c = 1; c < logits.rows(); ++c) mx = std::max(mx, logits(c, g));
        double z = 0.0;
        for (std::size_t c = 0; c < logits.rows(); ++c) z += std::exp(logits(c, g) - mx);
        double logz = mx + std::log(z);
        loss += logz - logits(static_cast<std::size_t>(labels[g]), g);
        if (dlogits)
            for (std::size_t c = 0; c < logits.rows(); ++c) {
                double pr = std::exp(logits(c, g) - logz);
                (*dlogits)(c, g) =
                    (pr - (static_cast<int>(c) == labels[g] ? 1.0 : 0.0)) /
                    static_cast<double>(b);
            }
    }
    return loss / static_cast<double>(b);
}

/// Analytic gradients for every parameter, including alpha and xi. Requires
/// the forward cache produced on the same inputs.
inline ModelParams backward(const ModelParams& params, const ModelConfig& cfg,
                            const GraphBatch& batch, const std::vector<int>& labels,
                            const ForwardCache& cache) {
    if (cache.offsets != batch.offsets || cache.layers.size() != cfg.layers)
        throw std::invalid_argument("backward: cache does not match batch/config");
    ModelParams grads = zeros_like(params);

    DenseMatrix dlogits;
    cross_entropy(cache.logits, labels, &dlogits);

    // Head.
    grads.head_w = matmul(dlogits, transpose(cache.readout));
    for (std::size_t c = 0; c < dlogits.rows(); ++c)
        for (std::size_t g = 0; g < dlogits.cols(); ++g)
            grads.head_b[c] += dlogits(c, g);
    DenseMatrix dr = matmul(transpose(params.head_w), dlogits);

    // Readout.
    DenseMatrix dh(cfg.hidden_dim, batch.total_nodes());
    for (std::size_t g = 0; g < batch.size(); ++g) {
        std::size_t c0 = batch.begin_of(g), c1 = batch.end_of(g);
        double scale = cfg.readout == Readout::Mean
                           ? 1.0 / static_cast<double>(c1 - c0)
                           : 1.0;
        for (std::size_t i = 0; i < cfg.hidden_dim; ++i)
            for (std::size_t c = c0; c < c1; ++c) dh(i, c) = dr(i, g) * scale;
    }

    for (std::size_t k = cfg.layers; k-- > 0;) {
        const LayerParams& lp = params.layers[k];
        LayerParams& gl = grads.layers[k];
        const LayerCache& lc = cache.layers[k];
        const bool has_norm = cfg.norm != NormKind::None;

        DenseMatrix dresidual;
        if (cfg.residual && lc.h_in.rows() == lc.h_out.rows()) dresidual = dh;

        auto norm_back = [&](const DenseMatrix& dy, std::size_t site) {
            NormSpec spec = detail::site_spec(cfg, lp.norms[site]);
            NormGrads ng = normalize_backward(dy, lc.norm_caches[site], spec);
            for (std::size_t i = 0; i < cfg.hidden_dim; ++i) {
                gl.norms[site].gamma[i] += ng.dgamma[i];
                gl.norms[site].beta[i] += ng.dbeta[i];
                if (!gl.norms[site].alpha.empty()) gl.norms[site].alpha[i] += ng.dalpha[i];
            }
            return ng.dx;
        };

        DenseMatrix dp;
        if (cfg.arch == Arch::GCN) {
            DenseMatrix dv = detail::relu_backward(dh, lc.relu_inputs[0]);
            dp = has_norm ? norm_back(dv, 0) : dv;
        } else {
            DenseMatrix dcur = dh;
            for (std::size_t s = cfg.mlp_depth; s-- > 0;) {
                DenseMatrix dt = detail::relu_backward(dcur, lc.relu_inputs[s]);
                if (has_norm && !cfg.norm_once) dt = norm_back(dt, s + 1);
                gl.mlp_w[s] = add(gl.mlp_w[s], matmul(dt, transpose(lc.mlp_inputs[s])));
                for (std::size_t i = 0; i < dt.rows(); ++i)
                    for (std::size_t c = 0; c < dt.cols(); ++c)
                        gl.mlp_b[s][i] += dt(i, c);
                dcur = matmul(transpose(lp.mlp_w[s]), dt);
            }
            dp = has_norm ? norm_back(dcur, 0) : dcur;
        }

        gl.w = add(gl.w, matmul(dp, transpose(lc.u)));
        DenseMatrix du = matmul(transpose(lp.w), dp);

        // Aggregation: dH = dU Q^T per graph; dxi accumulates <dU, H> (GIN).
        DenseMatrix dh_in(lc.h_in.rows(), lc.h_in.cols());
        for (std::size_t g = 0; g < batch.size(); ++g) {
            std::size_t c0 = batch.begin_of(g);
            std::size_t ng = batch.graphs[g]->n;
            const DenseMatrix& q = lc.q[g];
            for (std::size_t i = 0; i < du.rows(); ++i)
                for (std::size_t c = 0; c < ng; ++c) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < ng; ++l)
                        acc += du(i, c0 + l) * q(c, l);
                    dh_in(i, c0 + c) = acc;
                }
            if (cfg.arch == Arch::GIN)
                for (std::size_t i = 0; i < du.rows(); ++i)
                    for (std::size_t c = 0; c < ng; ++c)
                        gl.xi += du(i, c0 + c) * lc.h_in(i, c0 + c);
        }
        if (dresidual.rows() == dh_in.rows() && dresidual.cols() == dh_in.cols())
            dh_in = add(dh_in, dresidual);
        dh = dh_in;
    }
    return grads;
}

struct TrainSettings {
    std::size_t epochs = 400;
    std::size_t batch_size = 128;
    double lr = 1e-2;
    std::uint64_t seed = 1;
    std::size_t max_iters = 0;  // 0 = no cap
};

struct TrainTrace {
    std::vector<double> iter_loss;
    std::vector<std::size_t> iter_epoch;
    std::vector<double> epoch_train_acc;
    std::vector<double> epoch_test_acc;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

inline double evaluate(const ModelParams& params, const ModelConfig& cfg,
                       ModelState& state, const std::vector<const Graph*>& graphs) {
    if (graphs.empty()) return 0.0;
    GraphBatch batch = GraphBatch::of(graphs);
    DenseMatrix logits = forward(params, cfg, batch, NormMode::Eval, &state);
    std::size_t correct = 0;
    for (std::size_t g = 0; g < batch.size(); ++g) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < logits.rows(); ++c)
            if (logits(c, g) > logits(best, g)) best = c;  // ties keep lowest index
        if (static_cast<int>(best) == batch.graphs[g]->label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(batch.size());
}

/// Seeded mini-batch training: cross-entropy, Adam with bias correction,
/// linear learning-rate decay to zero over the configured epochs.
inline TrainTrace train(ModelParams& params, ModelState& state, const ModelConfig& cfg,
                        const std::vector<const Graph*>& train_graphs,
                        const std::vector<const Graph*>& test_graphs,
                        const TrainSettings& settings) {
    if (train_graphs.empty()) throw std::invalid_argument("train: empty dataset");
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(settings.seed);
    TrainTrace trace;
    trace.seed = settings.seed;

    ModelParams m1 = zeros_like(params), m2 = zeros_like(params);
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    std::size_t adam_t = 0;

    std::vector<std::size_t> order(train_graphs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t iter = 0;
    bool done = false;
    for (std::size_t epoch = 0; epoch < settings.epochs && !done; ++epoch) {
        double lr = settings.lr *
                    (1.0 - static_cast<double>(epoch) / static_cast<double>(settings.epochs));
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size() && !done;
             start += settings.batch_size) {
            std::size_t stop = std::min(start + settings.batch_size, order.size());
            std::vector<const Graph*> gs;
            std::vector<int> labels;
            for (std::size_t i = start; i < stop; ++i) {
                gs.push_back(train_graphs[order[i]]);
                labels.push_back(train_graphs[order[i]]->label);
            }
            GraphBatch batch = GraphBatch::of(gs);
            ForwardCache cache;
            DenseMatrix logits = forward(params, cfg, batch, NormMode::Train, &state, &cache);
            double loss = cross_entropy(logits, labels);
            if (!std::isfinite(loss) || loss > 1e6)
                throw std::runtime_error("train: divergence at iteration " +
                                         std::to_string(iter) + " (loss " +
                                         std::to_string(loss) + ")");
            trace.iter_loss.push_back(loss);
            trace.iter_epoch.push_back(epoch);

            ModelParams grads = backward(params, cfg, batch, labels, cache);
            ++adam_t;
            double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_t));
            double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_t));
            // Parallel walk over params/grads/moments.
            {
                std::vector<std::pair<double*, std::size_t>> pp, gg, mm1, mm2;
                auto collect = [](ModelParams& mp, const ModelConfig& c,
                                  std::vector<std::pair<double*, std::size_t>>& out) {
                    visit_params(mp, c,
                                 [&](const std::string&, double* d, std::size_t l) {
                                     out.emplace_back(d, l);
                                 });
                };
                collect(params, cfg, pp);
                collect(grads, cfg, gg);
                collect(m1, cfg, mm1);
                collect(m2, cfg, mm2);
                for (std::size_t s = 0; s < pp.size(); ++s)
                    for (std::size_t i = 0; i < pp[s].second; ++i) {
                        double g = gg[s].first[i];
                        double& v1 = mm1[s].first[i];
                        double& v2 = mm2[s].first[i];
                        v1 = beta1 * v1 + (1.0 - beta1) * g;
                        v2 = beta2 * v2 + (1.0 - beta2) * g * g;
                        pp[s].first[i] -=
                            lr * (v1 / bc1) / (std::sqrt(v2 / bc2) + adam_eps);
                    }
            }
            ++iter;
            if (settings.max_iters && iter >= settings.max_iters) done = true;
        }
        trace.epoch_train_acc.push_back(evaluate(params, cfg, state, train_graphs));
        trace.epoch_test_acc.push_back(
            test_graphs.empty() ? 0.0 : evaluate(params, cfg, state, test_graphs));
    }
    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

inline std::string train_trace_csv(const TrainTrace& trace) {
    CsvWriter csv({"iteration", "loss", "epoch", "train_acc", "test_acc"});
    for (std::size_t i = 0; i < trace.iter_loss.size(); ++i) {
        std::size_t e = trace.iter_epoch[i];
        bool have_acc = e < trace.epoch_train_acc.size();
        csv.row({std::to_string(i), fmt_num(trace.iter_loss[i]), std::to_string(e),
                 have_acc ? fmt_num(trace.epoch_train_acc[e]) : "",
                 have_acc ? fmt_num(trace.epoch_test_acc[e]) : ""});
    }
    return csv.str();
}

}  // namespace gnorm
