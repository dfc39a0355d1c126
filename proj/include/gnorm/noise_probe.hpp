#pragma once

// Batch-statistics noise measurement: for each model checkpoint, feed a fixed
// seeded batch partition and record the max/min batch-level mean and standard
// deviation of one feature dimension at a chosen BatchNorm input, alongside
// the dataset-level statistics over all nodes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nn.hpp"
#include "report.hpp"

namespace gnorm {

struct NoiseRecord {
    std::size_t epoch = 0;
    std::size_t layer_id = 0;
    std::size_t feature_dim = 0;
    double batch_mean_max = 0.0, batch_mean_min = 0.0;
    double batch_std_max = 0.0, batch_std_min = 0.0;
    double dataset_mean = 0.0, dataset_std = 0.0;
};

namespace detail {

/// Pre-normalization activations at norm site 0 of `layer_id`, for one batch.
inline DenseMatrix prenorm_activations(const ModelParams& params, const ModelConfig& cfg,
                                       ModelState& state, const GraphBatch& batch,
                                       std::size_t layer_id) {
    if (cfg.norm == NormKind::None)
        throw std::invalid_argument("noise probe: model has no normalization layer");
    if (layer_id >= cfg.layers)
        throw std::invalid_argument("noise probe: layer_id out of range");
    ForwardCache cache;
    forward(params, cfg, batch, NormMode::Train, &state, &cache);
    return cache.layers[layer_id].norm_caches[0].x;
}

}  // namespace detail

/// One NoiseRecord per checkpoint. The batch partition is a seeded shuffle of
/// the dataset split into batch_size chunks, fixed across checkpoints.
inline std::vector<NoiseRecord> probe(const std::vector<ModelParams>& checkpoints,
                                      const ModelConfig& cfg,
                                      const std::vector<const Graph*>& dataset,
                                      std::size_t batch_size, std::size_t layer_id,
                                      std::size_t feature_dim, std::uint64_t seed) {
    if (feature_dim >= cfg.hidden_dim)
        throw std::invalid_argument("noise probe: feature_dim out of range");
    Rng rng(seed);
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<const Graph*>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        std::vector<const Graph*> b;
        for (std::size_t i = start; i < std::min(start + batch_size, order.size()); ++i)
            b.push_back(dataset[order[i]]);
        batches.push_back(std::move(b));
    }

    std::vector<NoiseRecord> records;
    for (std::size_t ck = 0; ck < checkpoints.size(); ++ck) {
        // Probing must not disturb training state: use a scratch copy.
        ModelState scratch = ModelState::make(cfg);
        NoiseRecord rec;
        rec.epoch = ck;
        rec.layer_id = layer_id;
        rec.feature_dim = feature_dim;
        rec.batch_mean_max = -1e300;
        rec.batch_mean_min = 1e300;
        rec.batch_std_max = -1e300;
        rec.batch_std_min = 1e300;

        double ds_sum = 0.0, ds_sum2 = 0.0;
        std::size_t ds_count = 0;
        for (const auto& bg : batches) {
            GraphBatch batch = GraphBatch::of(bg);
            DenseMatrix x = detail::prenorm_activations(checkpoints[ck], cfg, scratch,
                                                        batch, layer_id);
            double s = 0.0, s2 = 0.0;
            for (std::size_t c = 0; c < x.cols(); ++c) {
                double v = x(feature_dim, c);
                s += v;
                s2 += v * v;
            }
            double nb = static_cast<double>(x.cols());
            double mu = s / nb;
            double var = std::max(s2 / nb - mu * mu, 0.0);
            double sd = std::sqrt(var);
            rec.batch_mean_max = std::max(rec.batch_mean_max, mu);
            rec.batch_mean_min = std::min(rec.batch_mean_min, mu);
            rec.batch_std_max = std::max(rec.batch_std_max, sd);
            rec.batch_std_min = std::min(rec.batch_std_min, sd);
            ds_sum += s;
            ds_sum2 += s2;
            ds_count += x.cols();
        }
        double nd = static_cast<double>(ds_count);
        rec.dataset_mean = ds_sum / nd;
        rec.dataset_std =
            std::sqrt(std::max(ds_sum2 / nd - rec.dataset_mean * rec.dataset_mean, 0.0));
        records.push_back(rec);
    }
    return records;
}

struct NoiseSummary {
    double mean_spread = 0.0;  // averaged over records
    double std_spread = 0.0;
    std::string csv;
};

/// Normalized spread (max - min) / (|dataset stat| + eps) per checkpoint.
inline NoiseSummary noise_summary(const std::vector<NoiseRecord>& records,
                                  double eps = 1e-8) {
    NoiseSummary out;
    CsvWriter csv({"epoch", "layer", "dim", "mean_max", "mean_min", "std_max", "std_min",
                   "ds_mean", "ds_std"});
    for (const auto& r : records) {
        csv.row({std::to_string(r.epoch), std::to_string(r.layer_id),
                 std::to_string(r.feature_dim), fmt_num(r.batch_mean_max),
                 fmt_num(r.batch_mean_min), fmt_num(r.batch_std_max),
                 fmt_num(r.batch_std_min), fmt_num(r.dataset_mean),
                 fmt_num(r.dataset_std)});
        out.mean_spread +=
            (r.batch_mean_max - r.batch_mean_min) / (std::abs(r.dataset_mean) + eps);
        out.std_spread +=
            (r.batch_std_max - r.batch_std_min) / (std::abs(r.dataset_std) + eps);
    }
    if (!records.empty()) {
        out.mean_spread /= static_cast<double>(records.size());
        out.std_spread /= static_cast<double>(records.size());
    }
    out.csv = csv.str();
    return out;
}

/// Band plot: dataset-level mean line plus the batch-level max/min envelope.
inline void write_noise_svg(const std::filesystem::path& path,
                            const std::vector<NoiseRecord>& records) {
    SvgSeries ds{"dataset mean", "#e377c2", {}, {}, false};
    SvgSeries hi{"batch mean max", "#2ca02c", {}, {}, false};
    SvgSeries lo{"batch mean min", "#1f77b4", {}, {}, false};
    for (const auto& r : records) {
        double x = static_cast<double>(r.epoch);
        ds.x.push_back(x);
        ds.y.push_back(r.dataset_mean);
        hi.x.push_back(x);
        hi.y.push_back(r.batch_mean_max);
        lo.x.push_back(x);
        lo.y.push_back(r.batch_mean_min);
    }
    write_svg_plot(path, "Batch-level vs dataset-level mean", {ds, hi, lo}, "checkpoint",
                   "mean of probed feature");
}

}  // namespace gnorm
