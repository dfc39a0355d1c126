#pragma once

// End-to-end linear-GNN convergence experiment: synthetic data whose noise is
// projected away from the direction Y^{-T}1 (so the shift removes no signal),
// closed-form least-squares optima, gradient descent at the largest stable
// step size, and measured vs predicted geometric rates for the vanilla and
// shifted models.

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "norm.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace gnorm {

struct LinearSample {
    DenseMatrix x;          // d x n feature matrix (the XQ product; Q folded in)
    std::vector<double> p;  // importance weights
    double y = 0.0;
};

struct TestbedConfig {
    std::size_t m = 2000;  // sample count
    std::size_t n = 8;     // node count == feature dimension
    double delta1 = 0.05;  // noise level
    double b = 0.0;        // boundedness constant; 0 means default 25*n
    std::uint64_t seed = 1;

    double bound() const { return b > 0.0 ? b : 25.0 * static_cast<double>(n); }
};

struct LinearDataset {
    std::vector<LinearSample> samples;
    DenseMatrix y_mean;          // Y = E[XQ]
    std::vector<double> w_true;  // ground-truth parameter (orthogonal to Y^{-T}1)
    std::vector<double> v_dir;   // v = Y^{-T}1, the direction the shift kills
    std::size_t rescaled_count = 0;  // p vectors rescaled by the bound
};

struct GdTrace {
    std::vector<double> err;  // ||w_t - w*||_2 per step (t = 0 included)
    double lr = 0.0;
};

struct ConvergenceTrace {
    GdTrace vanilla, shifted;
    double rho_vanilla = 0.0;
    double rho_shifted = 0.0;
};

namespace detail {

inline double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

}  // namespace detail

/// Draws Y (full rank, no eigenvector of YY^T orthogonal to the all-ones
/// vector), then per-sample XQ = Y + E with E projected orthogonal to
/// v = Y^{-T}1 and scaled so E[E E^T] <= delta1 I. Labels come from the
/// shifted model, y = w_true^T (XQ) N p, with w_true orthogonal to v so the
/// shifted least-squares problem is well-specified.
inline LinearDataset generate_dataset(const TestbedConfig& cfg) {
    if (cfg.m < 1 || cfg.n < 2 || cfg.delta1 < 0.0)
        throw std::invalid_argument("generate_dataset: invalid config");
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n;

    LinearDataset ds;
    int attempts = 0;
    for (;;) {
        if (++attempts > 1000)
            throw std::runtime_error("generate_dataset: Y resampling exceeded 1000 attempts");
        DenseMatrix y = detail::random_matrix(n, n, rng);
        Spectrum sv = singular_values(y);
        if (sv.values.back() < 0.1) continue;
        EigenResult e = sym_eigen(matmul(y, transpose(y)));
        bool ok = true;
        for (std::size_t j = 0; j < n && ok; ++j) {
            double dot = 0.0, nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dot += e.eigenvectors(i, j);
                nrm += e.eigenvectors(i, j) * e.eigenvectors(i, j);
            }
            if (std::abs(dot) < 1e-3 * std::sqrt(nrm)) ok = false;
        }
        if (!ok) continue;
        ds.y_mean = y;
        break;
    }

    // v = Y^{-T} 1.
    ds.v_dir = gauss_solve(transpose(ds.y_mean), std::vector<double>(n, 1.0));
    const double v_nrm2 = [&] {
        double s = 0.0;
        for (double x : ds.v_dir) s += x * x;
        return s;
    }();

    // w_true random, projected orthogonal to v so the min-norm shifted optimum
    // coincides with it.
    ds.w_true.resize(n);
    for (double& w : ds.w_true) w = rng.normal();
    {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += ds.w_true[i] * ds.v_dir[i];
        for (std::size_t i = 0; i < n; ++i) ds.w_true[i] -= dot / v_nrm2 * ds.v_dir[i];
    }

    const double noise_scale =
        cfg.delta1 > 0.0 ? std::sqrt(cfg.delta1 / static_cast<double>(n)) : 0.0;
    DenseMatrix nmat = shift_matrix(n);
    const double sqrt_b = std::sqrt(cfg.bound());

    ds.samples.reserve(cfg.m);
    for (std::size_t s = 0; s < cfg.m; ++s) {
        LinearSample smp;
        smp.x = ds.y_mean;
        if (noise_scale > 0.0) {
            DenseMatrix gmat = detail::random_matrix(n, n, rng);
            // Project each noise column orthogonal to v: E = P_v G.
            for (std::size_t c = 0; c < n; ++c) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += ds.v_dir[i] * gmat(i, c);
                for (std::size_t i = 0; i < n; ++i)
                    smp.x(i, c) += noise_scale * (gmat(i, c) - dot / v_nrm2 * ds.v_dir[i]);
            }
        }
        smp.p.resize(n);
        for (double& pv : smp.p) pv = rng.normal();
        // Boundedness: with Q folded into X, the constraint is ||X|| * ||p||.
        double x_norm = singular_values(smp.x).values.front();
        double p_norm = detail::vec_norm(smp.p);
        if (x_norm * p_norm > sqrt_b) {
            double f = sqrt_b / (x_norm * p_norm);
            for (double& pv : smp.p) pv *= f;
            ++ds.rescaled_count;
        }
        // y = w_true^T X N p.
        std::vector<double> np(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) np[i] += nmat(i, j) * smp.p[j];
        double yval = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double xi = 0.0;
            for (std::size_t j = 0; j < n; ++j) xi += smp.x(i, j) * np[j];
            yval += ds.w_true[i] * xi;
        }
        smp.y = yval;
        ds.samples.push_back(std::move(smp));
    }
    return ds;
}

/// Z: d x m; column i is X_i Q_i p_i (vanilla) or X_i Q_i N p_i (shifted).
inline DenseMatrix combined_features(const std::vector<LinearSample>& samples,
                                     bool shifted) {
    if (samples.empty()) throw std::invalid_argument("combined_features: empty dataset");
    const std::size_t n = samples[0].x.rows();
    DenseMatrix nmat = shift_matrix(n);
    DenseMatrix z(n, samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        std::vector<double> p = samples[s].p;
        if (shifted) {
            std::vector<double> np(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) np[i] += nmat(i, j) * p[j];
            p = np;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += samples[s].x(i, j) * p[j];
            z(i, s) = acc;
        }
    }
    return z;
}

/// w* = (Z Z^T)^+ Z y.
inline std::vector<double> closed_form_optimum(const DenseMatrix& z,
                                               const std::vector<double>& y) {
    if (z.cols() != y.size())
        throw std::invalid_argument("closed_form_optimum: y length mismatch");
    const std::size_t d = z.rows();
    DenseMatrix zzt = matmul(z, transpose(z));
    std::vector<double> zy(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t s = 0; s < z.cols(); ++s) zy[i] += z(i, s) * y[s];
    DenseMatrix pinv = pseudoinverse(zzt);
    std::vector<double> w(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) w[i] += pinv(i, j) * zy[j];
    return w;
}

struct SpectralSummary {
    double sigma_max = 0.0;
    double sigma_min_pos = 0.0;  // smallest positive eigenvalue of Z Z^T
    double rho() const { return 1.0 - sigma_min_pos / sigma_max; }
};

inline SpectralSummary gram_spectrum(const DenseMatrix& z) {
    EigenResult e = sym_eigen(matmul(z, transpose(z)));
    SpectralSummary s;
    s.sigma_max = e.eigenvalues.front();
    const double tol = 1e-10 * s.sigma_max;
    for (auto it = e.eigenvalues.rbegin(); it != e.eigenvalues.rend(); ++it)
        if (*it > tol) {
            s.sigma_min_pos = *it;
            break;
        }
    return s;
}

/// Full-batch gradient descent w_{t+1} = w_t - eta (ZZ^T w_t - Z y) from
/// w_0 = 0, recording ||w_t - w*|| each step. Default eta is the largest
/// stable rate 1/sigma_max(ZZ^T).
inline GdTrace gradient_descent(const DenseMatrix& z, const std::vector<double>& y,
                                std::size_t steps, double lr = 0.0) {
    const std::size_t d = z.rows();
    DenseMatrix zzt = matmul(z, transpose(z));
    std::vector<double> zy(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t s = 0; s < z.cols(); ++s) zy[i] += z(i, s) * y[s];
    SpectralSummary spec = gram_spectrum(z);
    GdTrace trace;
    trace.lr = lr > 0.0 ? lr : 1.0 / spec.sigma_max;

    std::vector<double> w_star = closed_form_optimum(z, y);
    std::vector<double> w(d, 0.0);
    auto record = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double t = w[i] - w_star[i];
            s += t * t;
        }
        trace.err.push_back(std::sqrt(s));
    };
    record();
    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> grad(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            double acc = -zy[i];
            for (std::size_t j = 0; j < d; ++j) acc += zzt(i, j) * w[j];
            grad[i] = acc;
        }
        for (std::size_t i = 0; i < d; ++i) w[i] -= trace.lr * grad[i];
        record();
    }
    return trace;
}

/// rho = 1 - sigma_min_pos / sigma_max of ZZ^T for each model.
inline std::pair<double, double> effective_condition_and_rates(
    const DenseMatrix& z_vanilla, const DenseMatrix& z_shift) {
    return {gram_spectrum(z_vanilla).rho(), gram_spectrum(z_shift).rho()};
}

struct TestbedResult {
    ConvergenceTrace trace;
    LinearDataset dataset;
};

inline TestbedResult run_testbed(const TestbedConfig& cfg, std::size_t steps = 200) {
    TestbedResult res;
    res.dataset = generate_dataset(cfg);
    DenseMatrix zv = combined_features(res.dataset.samples, false);
    DenseMatrix zs = combined_features(res.dataset.samples, true);
    std::vector<double> y(cfg.m);
    for (std::size_t i = 0; i < cfg.m; ++i) y[i] = res.dataset.samples[i].y;
    res.trace.vanilla = gradient_descent(zv, y, steps);
    res.trace.shifted = gradient_descent(zs, y, steps);
    auto [r1, r2] = effective_condition_and_rates(zv, zs);
    res.trace.rho_vanilla = r1;
    res.trace.rho_shifted = r2;
    return res;
}

inline std::string convergence_csv(const std::vector<ConvergenceTrace>& trials) {
    CsvWriter csv({"trial", "step", "err_vanilla", "err_shift", "rho1", "rho2"});
    for (std::size_t t = 0; t < trials.size(); ++t) {
        const auto& tr = trials[t];
        for (std::size_t s = 0; s < tr.vanilla.err.size(); ++s)
            csv.row({std::to_string(t), std::to_string(s), fmt_num(tr.vanilla.err[s]),
                     fmt_num(tr.shifted.err[s]), fmt_num(tr.rho_vanilla),
                     fmt_num(tr.rho_shifted)});
    }
    return csv.str();
}

inline void write_convergence_svg(const std::filesystem::path& path,
                                  const ConvergenceTrace& tr) {
    auto log_series = [](const std::vector<double>& e, const std::string& label,
                         const std::string& color) {
        SvgSeries s{label, color, {}, {}, false};
        for (std::size_t i = 0; i < e.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(std::log10(std::max(e[i], 1e-16)));
        }
        return s;
    };
    std::vector<SvgSeries> series{
        log_series(tr.vanilla.err, "vanilla", "#d62728"),
        log_series(tr.shifted.err, "shifted", "#1f77b4")};
    // Predicted-rate guide lines from the initial error.
    auto guide = [&](double rho, const std::string& label, const std::string& color) {
        SvgSeries s{label, color, {}, {}, false};
        double e0 = tr.vanilla.err.empty() ? 1.0 : tr.vanilla.err[0];
        for (std::size_t i = 0; i < tr.vanilla.err.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(std::log10(std::max(e0 * std::pow(rho, double(i)), 1e-16)));
        }
        return s;
    };
    series.push_back(guide(tr.rho_vanilla, "rho1 bound", "#ff9896"));
    series.push_back(guide(tr.rho_shifted, "rho2 bound", "#aec7e8"));
    write_svg_plot(path, "Linear model convergence (log10 error)", series, "step",
                   "log10 ||w_t - w*||");
}

}  // namespace gnorm
