#pragma once

// Empirical verification of the shift-as-preconditioner claims: singular
// value interlacing of Q vs QN, the guaranteed zero singular value of QN,
// condition-number improvement, and the regular/complete-graph degeneracy
// identities.

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "graph.hpp"
#include "linalg.hpp"
#include "norm.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace gnorm {

struct SpectrumReport {
    std::vector<double> lambda;  // singular values of Q, ascending
    std::vector<double> mu;      // singular values of QN, ascending
    bool interlacing_ok = false;
    bool zero_singular_present = false;
    double cond_q = 0.0;   // over positive singular values
    double cond_qn = 0.0;  // over positive singular values
    std::size_t graph_id = 0;
    std::string arch;
};

namespace detail {

inline double positive_condition_number(const std::vector<double>& asc, double tol) {
    double smax = asc.empty() ? 0.0 : asc.back();
    double smin_pos = 0.0;
    for (double v : asc)
        if (v > tol) {
            smin_pos = v;
            break;
        }
    return smin_pos > 0.0 ? smax / smin_pos : 0.0;
}

}  // namespace detail

/// Computes sigma(Q) and sigma(QN) and checks the ascending interlacing chain
/// lambda_1 <= mu_1 <= lambda_2 <= ... <= mu_{n-1} <= lambda_n along with the
/// presence of a zero singular value of QN. Tolerance is relative,
/// 1e-8 * lambda_max.
inline SpectrumReport spectrum_report(const DenseMatrix& q) {
    if (q.rows() != q.cols() || q.rows() < 2)
        throw std::invalid_argument("spectrum_report: need square n x n with n >= 2");
    const std::size_t n = q.rows();
    SpectrumReport rep;
    Spectrum sq = singular_values(q);
    Spectrum sqn = singular_values(matmul(q, shift_matrix(n)));
    rep.lambda.assign(sq.values.rbegin(), sq.values.rend());
    rep.mu.assign(sqn.values.rbegin(), sqn.values.rend());

    const double lam_max = rep.lambda.back();
    const double tol = 1e-8 * std::max(lam_max, 1e-30);
    rep.zero_singular_present = rep.mu.front() <= tol;

    // mu holds n values ascending; mu[0] is the structural zero. Interlace the
    // remaining n-1 between consecutive lambdas.
    rep.interlacing_ok = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double m = rep.mu[i + 1];
        if (m < rep.lambda[i] - tol || m > rep.lambda[i + 1] + tol) {
            rep.interlacing_ok = false;
            break;
        }
    }
    rep.cond_q = detail::positive_condition_number(rep.lambda, tol);
    rep.cond_qn = detail::positive_condition_number(rep.mu, tol);
    return rep;
}

/// || S(W H0 Q_GIN) N ||_F for an r-regular graph with one-hot degree
/// features. S is "safe": rows whose shifted deviation is negligible relative
/// to the row magnitude skip scaling, so exact zeros stay exact zeros instead
/// of amplifying round-off.
inline double verify_regular_zero(std::size_t n, std::size_t r, double xi,
                                  const DenseMatrix& w, bool use_gcn = false) {
    Graph g = make_regular_graph(n, r, 12345);
    DenseMatrix h0 = one_hot_degree_features(g, r);
    DenseMatrix a = adjacency(g);
    DenseMatrix q = use_gcn ? q_gcn(a) : q_gin(a, xi);
    DenseMatrix m = matmul(w, matmul(h0, q));
    DenseMatrix shifted = matmul(m, shift_matrix(n));
    for (std::size_t i = 0; i < shifted.rows(); ++i) {
        double row_scale = 0.0, dev = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            row_scale = std::max(row_scale, std::abs(m(i, c)));
            dev += shifted(i, c) * shifted(i, c);
        }
        double sigma = std::sqrt(dev / static_cast<double>(n));
        if (sigma > 1e-12 * (row_scale + 1.0))
            for (std::size_t c = 0; c < n; ++c) shifted(i, c) /= sigma;
    }
    return frobenius_norm(shifted);
}

/// || Q_GIN(K_n, xi) N - xi N ||_F; zero up to round-off for complete graphs.
inline double verify_complete_identity(std::size_t n, double xi) {
    DenseMatrix q = q_gin(adjacency(make_complete_graph(n)), xi);
    DenseMatrix nmat = shift_matrix(n);
    return frobenius_norm(sub(matmul(q, nmat), scale(nmat, xi)));
}

struct SurveyOutput {
    std::vector<SpectrumReport> reports;
    std::string csv;
};

inline std::string spectrum_list_str(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += fmt_num(v[i]);
    }
    return s;
}

/// Per-graph spectra for a sample of graphs under one aggregation scheme.
/// arch is "gcn", "gin0" (xi=0) or "gin1" (xi=1).
inline SurveyOutput dataset_spectrum_survey(const std::vector<const Graph*>& graphs,
                                            const std::string& arch,
                                            std::size_t sample_count,
                                            std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> ids(graphs.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    if (sample_count < ids.size()) {
        rng.shuffle(ids);
        ids.resize(sample_count);
        std::sort(ids.begin(), ids.end());
    }

    SurveyOutput out;
    CsvWriter csv({"graph_id", "n", "arch", "lambda", "mu", "cond_q", "cond_qn",
                   "interlacing_ok"});
    for (std::size_t id : ids) {
        const Graph& g = *graphs[id];
        if (g.n < 2) continue;
        DenseMatrix a = adjacency(g);
        DenseMatrix q;
        if (arch == "gcn")
            q = q_gcn(a);
        else if (arch == "gin0")
            q = q_gin(a, 0.0);
        else if (arch == "gin1")
            q = q_gin(a, 1.0);
        else
            throw std::invalid_argument("dataset_spectrum_survey: unknown arch '" + arch +
                                        "' (allowed: gcn gin0 gin1)");
        SpectrumReport rep = spectrum_report(q);
        rep.graph_id = id;
        rep.arch = arch;
        csv.row({std::to_string(id), std::to_string(g.n), arch,
                 spectrum_list_str(rep.lambda), spectrum_list_str(rep.mu),
                 fmt_num(rep.cond_q), fmt_num(rep.cond_qn),
                 rep.interlacing_ok ? "1" : "0"});
        out.reports.push_back(std::move(rep));
    }
    out.csv = csv.str();
    return out;
}

/// Overlay plot of sorted sigma(Q) vs sigma(QN) across surveyed graphs.
inline void write_spectrum_svg(const std::filesystem::path& path,
                               const std::vector<SpectrumReport>& reports) {
    SvgSeries sq{"sigma(Q)", "#d62728", {}, {}, true};
    SvgSeries sqn{"sigma(QN)", "#1f77b4", {}, {}, true};
    for (const auto& rep : reports) {
        for (std::size_t i = 0; i < rep.lambda.size(); ++i) {
            double frac = static_cast<double>(i) /
                          std::max<std::size_t>(rep.lambda.size() - 1, 1);
            sq.x.push_back(frac);
            sq.y.push_back(rep.lambda[i]);
            sqn.x.push_back(frac);
            sqn.y.push_back(rep.mu[i]);
        }
    }
    write_svg_plot(path, "Singular values of Q vs QN", {sq, sqn},
                   "sorted index (normalized)", "singular value");
}

}  // namespace gnorm
