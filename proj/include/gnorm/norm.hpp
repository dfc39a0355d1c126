#pragma once

// Aggregation matrices Q_GCN / Q_GIN, the shift projector N, and the four
// normalization adaptations (Batch / Layer / Instance / Graph) over
// block-concatenated node features. GraphNorm carries the learnable
// per-feature shift coefficient alpha; its variance is taken around the
// alpha-shifted mean, not the raw mean.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "linalg.hpp"

namespace gnorm {

/// Q_GCN = Dhat^{-1/2} Ahat Dhat^{-1/2} with Ahat = A + I.
inline DenseMatrix q_gcn(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0;  // self-loop from Ahat
        for (std::size_t j = 0; j < n; ++j) d += a(i, j);
        inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
    }
    DenseMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double ahat = a(i, j) + (i == j ? 1.0 : 0.0);
            q(i, j) = inv_sqrt_deg[i] * ahat * inv_sqrt_deg[j];
        }
    return q;
}

/// Q_GIN = A + (1 + xi) I.
inline DenseMatrix q_gin(const DenseMatrix& a, double xi) {
    DenseMatrix q = a;
    for (std::size_t i = 0; i < q.rows(); ++i) q(i, i) += 1.0 + xi;
    return q;
}

/// N = I - (1/n) 11^T; symmetric idempotent, annihilates the all-ones vector.
inline DenseMatrix shift_matrix(std::size_t n) {
    if (n < 1) throw std::invalid_argument("shift_matrix: n must be >= 1");
    DenseMatrix m(n, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? 1.0 : 0.0) - inv_n;
    return m;
}

enum class NormKind { None, Batch, Layer, Instance, Graph };

inline std::string to_string(NormKind k) {
    switch (k) {
        case NormKind::None: return "none";
        case NormKind::Batch: return "batch";
        case NormKind::Layer: return "layer";
        case NormKind::Instance: return "instance";
        case NormKind::Graph: return "graph";
    }
    return "?";
}

inline NormKind norm_kind_from_string(const std::string& s) {
    if (s == "none") return NormKind::None;
    if (s == "batch") return NormKind::Batch;
    if (s == "layer") return NormKind::Layer;
    if (s == "instance") return NormKind::Instance;
    if (s == "graph") return NormKind::Graph;
    throw std::invalid_argument("unknown norm kind '" + s +
                                "' (allowed: none batch layer instance graph)");
}

struct NormSpec {
    NormKind kind = NormKind::None;
    std::vector<double> gamma;  // per feature
    std::vector<double> beta;   // per feature
    std::vector<double> alpha;  // per feature; used only for kind == Graph
    double epsilon = 1e-5;

    static NormSpec make(NormKind kind, std::size_t dim, double eps = 1e-5) {
        NormSpec s;
        s.kind = kind;
        s.epsilon = eps;
        s.gamma.assign(dim, 1.0);
        s.beta.assign(dim, 0.0);
        if (kind == NormKind::Graph) s.alpha.assign(dim, 1.0);
        return s;
    }
};

struct BatchNormState {
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.1;

    static BatchNormState make(std::size_t dim, double momentum = 0.1) {
        BatchNormState s;
        s.running_mean.assign(dim, 0.0);
        s.running_var.assign(dim, 1.0);
        s.momentum = momentum;
        return s;
    }
};

enum class NormMode { Train, Eval };

/// Cached forward quantities needed to backpropagate through the statistics.
struct NormCache {
    NormKind kind = NormKind::None;
    DenseMatrix x;                     // input, d x total_nodes
    std::vector<std::size_t> offsets;  // graph column boundaries
    // Per-scope statistics; layout depends on kind.
    std::vector<double> mu;       // mean per scope (raw mean for Graph)
    std::vector<double> inv_std;  // 1/sqrt(var + eps) per scope
    DenseMatrix shifted;          // x minus (alpha-)shifted mean
    bool eval_mode = false;
};

namespace detail {

inline void check_norm_shapes(const DenseMatrix& h,
                              const std::vector<std::size_t>& offsets,
                              const NormSpec& spec) {
    if (!offsets.empty() && offsets.back() != h.cols())
        throw std::invalid_argument("normalize: batch offsets end at " +
                                    std::to_string(offsets.back()) + " but h has " +
                                    std::to_string(h.cols()) + " columns");
    if (spec.kind != NormKind::None &&
        (spec.gamma.size() != h.rows() || spec.beta.size() != h.rows()))
        throw std::invalid_argument("normalize: gamma/beta length does not match feature dim");
    if (spec.kind == NormKind::Graph && spec.alpha.size() != h.rows())
        throw std::invalid_argument("normalize: alpha length does not match feature dim");
}

}  // namespace detail

/// Applies the normalization named by spec.kind to h (d x total_nodes, columns
/// partitioned by offsets). In train mode, kind == Batch updates `state`
/// running statistics; eval mode reads them instead. A cache pointer can be
/// supplied for later backpropagation.
inline DenseMatrix normalize(const DenseMatrix& h,
                             const std::vector<std::size_t>& offsets,
                             const NormSpec& spec, BatchNormState* state,
                             NormMode mode, NormCache* cache = nullptr) {
    detail::check_norm_shapes(h, offsets, spec);
    const std::size_t d = h.rows();
    const std::size_t cols = h.cols();
    const double eps = spec.epsilon;

    if (cache) {
        cache->kind = spec.kind;
        cache->x = h;
        cache->offsets = offsets;
        cache->eval_mode = (mode == NormMode::Eval);
        cache->mu.clear();
        cache->inv_std.clear();
    }

    DenseMatrix out(d, cols);
    switch (spec.kind) {
        case NormKind::None:
            return h;

        case NormKind::Batch: {
            if (!state) throw std::invalid_argument("normalize: BatchNorm needs state");
            std::vector<double> mu(d), inv_std(d);
            if (mode == NormMode::Train) {
                for (std::size_t j = 0; j < d; ++j) {
                    double m = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) m += h(j, c);
                    m /= static_cast<double>(cols);
                    double v = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) {
                        double t = h(j, c) - m;
                        v += t * t;
                    }
                    v /= static_cast<double>(cols);
                    mu[j] = m;
                    inv_std[j] = 1.0 / std::sqrt(v + eps);
                    state->running_mean[j] =
                        (1.0 - state->momentum) * state->running_mean[j] + state->momentum * m;
                    state->running_var[j] =
                        (1.0 - state->momentum) * state->running_var[j] + state->momentum * v;
                }
            } else {
                for (std::size_t j = 0; j < d; ++j) {
                    mu[j] = state->running_mean[j];
                    inv_std[j] = 1.0 / std::sqrt(state->running_var[j] + eps);
                }
            }
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t c = 0; c < cols; ++c)
                    out(j, c) = spec.gamma[j] * (h(j, c) - mu[j]) * inv_std[j] + spec.beta[j];
            if (cache) {
                cache->mu = mu;
                cache->inv_std = inv_std;
            }
            return out;
        }

        case NormKind::Layer: {
            // Per node column, over the feature dimension.
            std::vector<double> mu(cols), inv_std(cols);
            for (std::size_t c = 0; c < cols; ++c) {
                double m = 0.0;
                for (std::size_t j = 0; j < d; ++j) m += h(j, c);
                m /= static_cast<double>(d);
                double v = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    double t = h(j, c) - m;
                    v += t * t;
                }
                v /= static_cast<double>(d);
                mu[c] = m;
                inv_std[c] = 1.0 / std::sqrt(v + eps);
            }
            for (std::size_t c = 0; c < cols; ++c)
                for (std::size_t j = 0; j < d; ++j)
                    out(j, c) = spec.gamma[j] * (h(j, c) - mu[c]) * inv_std[c] + spec.beta[j];
            if (cache) {
                cache->mu = mu;
                cache->inv_std = inv_std;
            }
            return out;
        }

        case NormKind::Instance:
        case NormKind::Graph: {
            // Per graph and feature, over that graph's nodes. GraphNorm shifts
            // by alpha * mean and takes the variance around the shifted values.
            const std::size_t b = offsets.size();
            if (b == 0)
                throw std::invalid_argument("normalize: instance/graph kinds need batch offsets");
            std::vector<double> mu(b * d), inv_std(b * d);
            DenseMatrix shifted(d, cols);
            for (std::size_t g = 0; g < b; ++g) {
                std::size_t c0 = g == 0 ? 0 : offsets[g - 1];
                std::size_t c1 = offsets[g];
                double ng = static_cast<double>(c1 - c0);
                for (std::size_t j = 0; j < d; ++j) {
                    double m = 0.0;
                    for (std::size_t c = c0; c < c1; ++c) m += h(j, c);
                    m /= ng;
                    double a = spec.kind == NormKind::Graph ? spec.alpha[j] : 1.0;
                    double v = 0.0;
                    for (std::size_t c = c0; c < c1; ++c) {
                        double t = h(j, c) - a * m;
                        shifted(j, c) = t;
                        v += t * t;
                    }
                    v /= ng;
                    mu[g * d + j] = m;
                    inv_std[g * d + j] = 1.0 / std::sqrt(v + eps);
                    for (std::size_t c = c0; c < c1; ++c)
                        out(j, c) = spec.gamma[j] * shifted(j, c) * inv_std[g * d + j] +
                                    spec.beta[j];
                }
            }
            if (cache) {
                cache->mu = mu;
                cache->inv_std = inv_std;
                cache->shifted = shifted;
            }
            return out;
        }
    }
    return out;
}

struct NormGrads {
    DenseMatrix dx;
    std::vector<double> dgamma;
    std::vector<double> dbeta;
    std::vector<double> dalpha;  // empty unless kind == Graph
};

/// Backpropagates through normalize() given the upstream gradient dy and the
/// forward cache. Train-mode statistics are differentiated through; eval-mode
/// BatchNorm treats the running stats as constants.
inline NormGrads normalize_backward(const DenseMatrix& dy, const NormCache& cache,
                                    const NormSpec& spec) {
    const std::size_t d = cache.x.rows();
    const std::size_t cols = cache.x.cols();
    NormGrads g;
    g.dx = DenseMatrix(d, cols);
    g.dgamma.assign(d, 0.0);
    g.dbeta.assign(d, 0.0);
    if (spec.kind == NormKind::Graph) g.dalpha.assign(d, 0.0);

    switch (spec.kind) {
        case NormKind::None:
            g.dx = dy;
            return g;

        case NormKind::Batch: {
            const double n = static_cast<double>(cols);
            for (std::size_t j = 0; j < d; ++j) {
                double is = cache.inv_std[j];
                double m = cache.mu[j];
                if (cache.eval_mode) {
                    for (std::size_t c = 0; c < cols; ++c) {
                        double xhat = (cache.x(j, c) - m) * is;
                        g.dgamma[j] += dy(j, c) * xhat;
                        g.dbeta[j] += dy(j, c);
                        g.dx(j, c) = dy(j, c) * spec.gamma[j] * is;
                    }
                    continue;
                }
                double sum_dy = 0.0, sum_dy_xhat = 0.0;
                for (std::size_t c = 0; c < cols; ++c) {
                    double xhat = (cache.x(j, c) - m) * is;
                    sum_dy += dy(j, c);
                    sum_dy_xhat += dy(j, c) * xhat;
                    g.dgamma[j] += dy(j, c) * xhat;
                    g.dbeta[j] += dy(j, c);
                }
                for (std::size_t c = 0; c < cols; ++c) {
                    double xhat = (cache.x(j, c) - m) * is;
                    g.dx(j, c) = spec.gamma[j] * is / n *
                                 (n * dy(j, c) - sum_dy - xhat * sum_dy_xhat);
                }
            }
            return g;
        }

        case NormKind::Layer: {
            const double nd = static_cast<double>(d);
            for (std::size_t c = 0; c < cols; ++c) {
                double is = cache.inv_std[c];
                double m = cache.mu[c];
                double sum_gdy = 0.0, sum_gdy_xhat = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    double xhat = (cache.x(j, c) - m) * is;
                    double gd = dy(j, c) * spec.gamma[j];
                    sum_gdy += gd;
                    sum_gdy_xhat += gd * xhat;
                    g.dgamma[j] += dy(j, c) * xhat;
                    g.dbeta[j] += dy(j, c);
                }
                for (std::size_t j = 0; j < d; ++j) {
                    double xhat = (cache.x(j, c) - m) * is;
                    double gd = dy(j, c) * spec.gamma[j];
                    g.dx(j, c) = is * (gd - sum_gdy / nd - xhat * sum_gdy_xhat / nd);
                }
            }
            return g;
        }

        case NormKind::Instance:
        case NormKind::Graph: {
            const std::size_t b = cache.offsets.size();
            for (std::size_t gi = 0; gi < b; ++gi) {
                std::size_t c0 = gi == 0 ? 0 : cache.offsets[gi - 1];
                std::size_t c1 = cache.offsets[gi];
                double ng = static_cast<double>(c1 - c0);
                for (std::size_t j = 0; j < d; ++j) {
                    double is = cache.inv_std[gi * d + j];
                    double m = cache.mu[gi * d + j];
                    double a = spec.kind == NormKind::Graph ? spec.alpha[j] : 1.0;
                    // out = gamma * s * is + beta with s = x - a*m,
                    // is = (mean(s^2) + eps)^{-1/2}.
                    double sum_ds = 0.0;   // sum over dL/ds_i (direct term)
                    double sum_dy_s = 0.0;
                    for (std::size_t c = c0; c < c1; ++c) {
                        double s = cache.shifted(j, c);
                        double xhat = s * is;
                        g.dgamma[j] += dy(j, c) * xhat;
                        g.dbeta[j] += dy(j, c);
                        sum_dy_s += dy(j, c) * s;
                    }
                    // dL/dvar via the inv_std factor.
                    double dvar = -0.5 * spec.gamma[j] * sum_dy_s * is * is * is;
                    std::vector<double> ds(c1 - c0);
                    for (std::size_t c = c0; c < c1; ++c) {
                        double s = cache.shifted(j, c);
                        ds[c - c0] = dy(j, c) * spec.gamma[j] * is + dvar * 2.0 * s / ng;
                        sum_ds += ds[c - c0];
                    }
                    // ds_i/dx_k = delta_ik - a/ng.
                    for (std::size_t c = c0; c < c1; ++c)
                        g.dx(j, c) = ds[c - c0] - a * sum_ds / ng;
                    if (spec.kind == NormKind::Graph) g.dalpha[j] += -m * sum_ds;
                }
            }
            return g;
        }
    }
    return g;
}

/// Matrix-form single-graph path: S (W H Q) N, with S = diag(1/sigma_i) where
/// sigma_i is the epsilon-stabilized standard deviation of row i after the
/// shift. Cross-checked against normalize(kind=Instance, gamma=1, beta=0).
inline DenseMatrix apply_shift_scale(const DenseMatrix& w_h_q, double eps = 1e-5) {
    const std::size_t n = w_h_q.cols();
    DenseMatrix shifted = matmul(w_h_q, shift_matrix(n));
    for (std::size_t i = 0; i < shifted.rows(); ++i) {
        double v = 0.0;
        for (std::size_t c = 0; c < n; ++c) v += shifted(i, c) * shifted(i, c);
        v /= static_cast<double>(n);
        double inv = 1.0 / std::sqrt(v + eps);
        for (std::size_t c = 0; c < n; ++c) shifted(i, c) *= inv;
    }
    return shifted;
}

}  // namespace gnorm
