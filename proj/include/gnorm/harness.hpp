#pragma once

// Experiment harness behind the command-line tool: flat key=value config with
// typed lookups, the five experiment subcommands, and deterministic CSV/SVG
// artifact emission. Everything is callable from tests.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dataset_io.hpp"
#include "graph.hpp"
#include "linear_testbed.hpp"
#include "nn.hpp"
#include "noise_probe.hpp"
#include "report.hpp"
#include "spectral.hpp"

namespace gnorm {

class RunConfig {
public:
    RunConfig() {
        // Defaults mirror the desk-scale experiment settings.
        kv_ = {{"seed", "1"},        {"data_dir", ""},       {"dataset", "synthetic-er"},
               {"arch", "gin"},      {"norm", "graph"},      {"batch_size", "128"},
               {"epochs", "40"},     {"lr", "0.01"},         {"hidden_dim", "16"},
               {"readout", "sum"},   {"out", "out"},         {"jobs", "1"},
               {"folds", "0"},       {"sweep", "0"},         {"layers", "5"},
               {"trials", "20"},     {"max_iters", "0"},     {"probe_layer", "0"},
               {"probe_dim", "0"},   {"probe_epochs", "3"},  {"delta1", "0.05"},
               {"samples", "2000"},  {"testbed_dim", "8"},   {"gd_steps", "200"}};
    }

    void load_file(const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) throw std::runtime_error("config file not found: " + p.string());
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    void set(const std::string& key, const std::string& value) {
        if (!kv_.count(key)) {
            std::string allowed;
            for (const auto& [k, v] : kv_) allowed += k + " ";
            throw std::invalid_argument("unknown config key '" + key +
                                        "' (allowed: " + allowed + ")");
        }
        kv_[key] = value;
    }

    std::string str(const std::string& key) const { return kv_.at(key); }
    long num(const std::string& key) const { return std::stol(kv_.at(key)); }
    double real(const std::string& key) const { return std::stod(kv_.at(key)); }
    std::uint64_t seed() const { return static_cast<std::uint64_t>(num("seed")); }
    std::filesystem::path out_dir() const { return kv_.at("out"); }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    std::map<std::string, std::string> kv_;
};

namespace detail {

inline void parallel_for(std::size_t count, std::size_t jobs,
                         const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t workers = std::min(jobs, count);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    for (auto& t : pool) t.join();
}

/// Loads the configured dataset: a TUDataset directory when data_dir is set,
/// otherwise one of the synthetic generators.
inline std::vector<Graph> load_graphs(const RunConfig& cfg) {
    const std::string name = cfg.str("dataset");
    if (!cfg.str("data_dir").empty() && name.rfind("synthetic", 0) != 0) {
        auto [graphs, meta] = parse_tudataset(cfg.str("data_dir"), name);
        return graphs;
    }
    if (name == "synthetic-regular")
        return make_synthetic_classification_set(60, ClassRule::RegularDegree, cfg.seed());
    if (name == "synthetic-er")
        return make_synthetic_classification_set(60, ClassRule::ErDensity, cfg.seed());
    throw std::invalid_argument("unknown dataset '" + name +
                                "' (allowed: synthetic-regular synthetic-er, or a "
                                "TUDataset name with --data-dir)");
}

inline ModelConfig model_config(const RunConfig& cfg, std::size_t input_dim,
                                std::size_t classes, NormKind kind) {
    ModelConfig mc;
    mc.arch = cfg.str("arch") == "gcn" ? Arch::GCN : Arch::GIN;
    if (cfg.str("arch") != "gcn" && cfg.str("arch") != "gin")
        throw std::invalid_argument("unknown arch '" + cfg.str("arch") +
                                    "' (allowed: gin gcn)");
    mc.layers = static_cast<std::size_t>(cfg.num("layers"));
    mc.hidden_dim = static_cast<std::size_t>(cfg.num("hidden_dim"));
    mc.norm = kind;
    mc.readout = cfg.str("readout") == "mean" ? Readout::Mean : Readout::Sum;
    if (cfg.str("readout") != "mean" && cfg.str("readout") != "sum")
        throw std::invalid_argument("unknown readout '" + cfg.str("readout") +
                                    "' (allowed: sum mean)");
    mc.classes = classes;
    mc.input_dim = input_dim;
    return mc;
}

inline std::vector<const Graph*> pointers(const std::vector<Graph>& gs) {
    std::vector<const Graph*> out;
    out.reserve(gs.size());
    for (const Graph& g : gs) out.push_back(&g);
    return out;
}

}  // namespace detail

/// Singular-value survey of Q and QN over dataset (or seeded ER) graphs for
/// gcn/gin0/gin1 aggregations. Exit 0 iff every interlacing check passes.
inline int cmd_spectrum(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir());
    std::vector<Graph> storage;
    if (!cfg.str("data_dir").empty()) {
        storage = detail::load_graphs(cfg);
    } else {
        Rng rng(cfg.seed());
        for (int i = 0; i < 50; ++i) {
            std::size_t n = 4 + rng.below(9);  // 4..12
            storage.push_back(make_er_graph(n, 0.4, rng.fork_seed()));
        }
    }
    auto ptrs = detail::pointers(storage);

    bool all_ok = true;
    std::string csv;
    std::vector<SpectrumReport> all_reports;
    for (const std::string& arch : {"gcn", "gin0", "gin1"}) {
        SurveyOutput survey = dataset_spectrum_survey(ptrs, arch, ptrs.size(), cfg.seed());
        for (const auto& rep : survey.reports) {
            if (!rep.interlacing_ok || !rep.zero_singular_present) all_ok = false;
            all_reports.push_back(rep);
        }
        if (csv.empty())
            csv = survey.csv;
        else {  // append without the header line
            auto nl = survey.csv.find('\n');
            csv += survey.csv.substr(nl + 1);
        }
    }
    std::ofstream f(cfg.out_dir() / "spectra.csv", std::ios::binary);
    f << csv;
    f.close();
    write_spectrum_svg(cfg.out_dir() / "spectra.svg", all_reports);
    if (!all_ok) std::cerr << "spectrum: interlacing violation detected\n";
    return all_ok ? 0 : 1;
}

/// Regular-graph and complete-graph degeneracy sweeps. Exit 0 iff all
/// residuals are within tolerance.
inline int cmd_verify_props(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir());
    Rng rng(cfg.seed());
    CsvWriter csv({"check", "n", "r", "xi", "residual", "ok"});
    bool all_ok = true;
    for (std::size_t n = 4; n <= 12; ++n)
        for (std::size_t r : {2, 3, 4}) {
            if (r >= n || (n * r) % 2 != 0) continue;
            for (double xi : {0.0, 0.3, 1.0}) {
                DenseMatrix w(5, r + 1);
                for (double& v : w.data()) v = rng.normal();
                double res = verify_regular_zero(n, r, xi, w);
                bool ok = res <= 1e-10;
                all_ok = all_ok && ok;
                csv.row({"regular_zero", std::to_string(n), std::to_string(r),
                         fmt_num(xi), fmt_num(res), ok ? "1" : "0"});
            }
        }
    for (std::size_t n = 2; n <= 12; ++n)
        for (double xi : {0.0, 0.7, 1.0}) {
            double res = verify_complete_identity(n, xi);
            bool ok = res <= 1e-12;
            all_ok = all_ok && ok;
            csv.row({"complete_identity", std::to_string(n), "", fmt_num(xi),
                     fmt_num(res), ok ? "1" : "0"});
        }
    csv.save(cfg.out_dir() / "props.csv");
    if (!all_ok) std::cerr << "verify-props: residual above tolerance\n";
    return all_ok ? 0 : 1;
}

/// Trial ensemble of the linear convergence experiment. Exit 0 iff the
/// shifted model beats the vanilla rate in at least 95% of trials.
inline int cmd_linear_testbed(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir());
    const std::size_t trials = static_cast<std::size_t>(cfg.num("trials"));
    Rng master(cfg.seed());
    std::vector<std::uint64_t> seeds;
    for (std::size_t t = 0; t < trials; ++t) seeds.push_back(master.fork_seed());

    std::vector<ConvergenceTrace> traces(trials);
    detail::parallel_for(trials, static_cast<std::size_t>(cfg.num("jobs")),
                         [&](std::size_t t) {
                             TestbedConfig tb;
                             tb.m = static_cast<std::size_t>(cfg.num("samples"));
                             tb.n = static_cast<std::size_t>(cfg.num("testbed_dim"));
                             tb.delta1 = cfg.real("delta1");
                             tb.seed = seeds[t];
                             traces[t] = run_testbed(
                                             tb, static_cast<std::size_t>(cfg.num("gd_steps")))
                                             .trace;
                         });

    std::size_t wins = 0;
    for (const auto& tr : traces)
        if (tr.rho_shifted < tr.rho_vanilla) ++wins;
    double frac = static_cast<double>(wins) / static_cast<double>(trials);

    std::ofstream f(cfg.out_dir() / "convergence.csv", std::ios::binary);
    f << convergence_csv(traces);
    f.close();
    write_convergence_svg(cfg.out_dir() / "convergence.svg", traces.front());
    if (frac < 0.95)
        std::cerr << "linear-testbed: rho2 < rho1 in only " << wins << "/" << trials
                  << " trials\n";
    return frac >= 0.95 ? 0 : 1;
}

struct TrainCommandResult {
    std::map<std::string, TrainTrace> traces;  // by norm kind
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
};

/// Trains one (arch, norm) pair, a sweep over norm kinds (norm=all) with a
/// shared weight init, and/or a stratified cross-validation when folds > 0.
inline TrainCommandResult run_train_command(const RunConfig& cfg) {
    std::vector<Graph> graphs = detail::load_graphs(cfg);
    auto ptrs = detail::pointers(graphs);
    std::size_t input_dim = graphs.front().node_features.rows();
    std::set<int> classes;
    for (const Graph& g : graphs) classes.insert(g.label);

    TrainSettings settings;
    settings.epochs = static_cast<std::size_t>(cfg.num("epochs"));
    settings.batch_size = static_cast<std::size_t>(cfg.num("batch_size"));
    settings.lr = cfg.real("lr");
    settings.seed = cfg.seed();
    settings.max_iters = static_cast<std::size_t>(cfg.num("max_iters"));

    TrainCommandResult res;
    std::vector<std::string> kinds;
    if (cfg.str("sweep") == "1" || cfg.str("norm") == "all")
        kinds = {"none", "batch", "layer", "instance", "graph"};
    else
        kinds = {cfg.str("norm")};

    for (const std::string& kind_name : kinds) {
        NormKind kind = norm_kind_from_string(kind_name);
        ModelConfig mc = detail::model_config(cfg, input_dim, classes.size(), kind);
        // Shared init: same seed drives identical W draws across kinds.
        ModelParams params = init_params(mc, cfg.seed());
        ModelState state = ModelState::make(mc);
        res.traces[kind_name] = train(params, state, mc, ptrs, {}, settings);
    }

    const long folds = cfg.num("folds");
    if (folds > 0) {
        std::vector<int> labels;
        for (const Graph& g : graphs) labels.push_back(g.label);
        auto splits = stratified_folds(labels, static_cast<std::size_t>(folds), cfg.seed());
        res.fold_accuracies.assign(splits.size(), 0.0);
        NormKind kind = norm_kind_from_string(kinds.front() == "all" ? "graph"
                                                                     : kinds.front());
        detail::parallel_for(
            splits.size(), static_cast<std::size_t>(cfg.num("jobs")),
            [&](std::size_t f) {
                std::vector<const Graph*> tr, te;
                for (std::size_t i : splits[f].train_ids) tr.push_back(&graphs[i]);
                for (std::size_t i : splits[f].test_ids) te.push_back(&graphs[i]);
                ModelConfig mc = detail::model_config(cfg, input_dim, classes.size(), kind);
                ModelParams params = init_params(mc, cfg.seed());
                ModelState state = ModelState::make(mc);
                TrainSettings fold_settings = settings;
                fold_settings.seed = cfg.seed() + f + 1;
                TrainTrace t = train(params, state, mc, tr, te, fold_settings);
                res.fold_accuracies[f] =
                    t.epoch_test_acc.empty() ? 0.0 : t.epoch_test_acc.back();
            });
        for (double a : res.fold_accuracies) res.mean_accuracy += a;
        res.mean_accuracy /= static_cast<double>(res.fold_accuracies.size());
    }
    return res;
}

inline int cmd_train(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir());
    TrainCommandResult res = run_train_command(cfg);

    // curves.csv: one loss column per trained kind.
    std::size_t max_len = 0;
    for (const auto& [kind, tr] : res.traces)
        max_len = std::max(max_len, tr.iter_loss.size());
    std::vector<std::string> header{"iteration"};
    for (const auto& [kind, tr] : res.traces) header.push_back("loss_" + kind);
    CsvWriter csv(header);
    for (std::size_t i = 0; i < max_len; ++i) {
        std::vector<std::string> row{std::to_string(i)};
        for (const auto& [kind, tr] : res.traces)
            row.push_back(i < tr.iter_loss.size() ? fmt_num(tr.iter_loss[i]) : "");
        csv.row(row);
    }
    csv.save(cfg.out_dir() / "curves.csv");

    std::vector<SvgSeries> series;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::size_t ci = 0;
    for (const auto& [kind, tr] : res.traces) {
        SvgSeries s{kind, colors[ci++ % 5], {}, {}, false};
        for (std::size_t i = 0; i < tr.iter_loss.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(tr.iter_loss[i]);
        }
        series.push_back(std::move(s));
    }
    write_svg_plot(cfg.out_dir() / "curves.svg", "Training loss", series, "iteration",
                   "loss");

    if (!res.fold_accuracies.empty()) {
        CsvWriter summary({"fold", "test_acc"});
        for (std::size_t f = 0; f < res.fold_accuracies.size(); ++f)
            summary.row({std::to_string(f), fmt_num(res.fold_accuracies[f])});
        summary.row({"mean", fmt_num(res.mean_accuracy)});
        summary.save(cfg.out_dir() / "summary.csv");
    }
    return 0;
}

/// Trains with BatchNorm, probes batch statistics per checkpoint, and writes
/// noise.csv / noise.svg.
inline int cmd_noise_probe(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir());
    std::vector<Graph> graphs = detail::load_graphs(cfg);
    auto ptrs = detail::pointers(graphs);
    std::size_t input_dim = graphs.front().node_features.rows();
    std::set<int> classes;
    for (const Graph& g : graphs) classes.insert(g.label);

    ModelConfig mc = detail::model_config(cfg, input_dim, classes.size(), NormKind::Batch);
    ModelParams params = init_params(mc, cfg.seed());
    ModelState state = ModelState::make(mc);
    TrainSettings settings;
    settings.epochs = 1;
    settings.batch_size = static_cast<std::size_t>(cfg.num("batch_size"));
    settings.lr = cfg.real("lr");
    settings.seed = cfg.seed();

    std::vector<ModelParams> checkpoints{params};  // initial state counts as epoch 0
    const std::size_t probe_epochs = static_cast<std::size_t>(cfg.num("probe_epochs"));
    for (std::size_t e = 0; e < probe_epochs; ++e) {
        TrainSettings s = settings;
        s.seed = cfg.seed() + e;
        train(params, state, mc, ptrs, {}, s);
        checkpoints.push_back(params);
    }

    auto records = probe(checkpoints, mc, ptrs,
                         static_cast<std::size_t>(cfg.num("batch_size")),
                         static_cast<std::size_t>(cfg.num("probe_layer")),
                         static_cast<std::size_t>(cfg.num("probe_dim")), cfg.seed());
    NoiseSummary summary = noise_summary(records);
    std::ofstream f(cfg.out_dir() / "noise.csv", std::ios::binary);
    f << summary.csv;
    f.close();
    write_noise_svg(cfg.out_dir() / "noise.svg", records);
    return 0;
}

}  // namespace gnorm
