// Command-line front end for the gnorm experiment harness.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <gnorm/harness.hpp>

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    long seed = -1;
    std::string data_dir;
    std::string out;
    long jobs = -1;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "Flat key=value config file");
    sub->add_option("--seed", opts.seed, "Master RNG seed");
    sub->add_option("--data-dir", opts.data_dir, "Directory with TUDataset files");
    sub->add_option("--out", opts.out, "Output directory for CSV/SVG artifacts");
    sub->add_option("--jobs", opts.jobs, "Worker threads for independent trials/folds");
    sub->add_option("--set", opts.overrides, "Override a config key, e.g. --set lr=0.01")
        ->take_all();
}

gnorm::RunConfig build_config(const CommonOpts& opts) {
    gnorm::RunConfig cfg;
    if (!opts.config_path.empty()) cfg.load_file(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    // Direct flags win over both the file and --set.
    if (opts.seed >= 0) cfg.set("seed", std::to_string(opts.seed));
    if (!opts.data_dir.empty()) cfg.set("data_dir", opts.data_dir);
    if (!opts.out.empty()) cfg.set("out", opts.out);
    if (opts.jobs >= 0) cfg.set("jobs", std::to_string(opts.jobs));
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph normalization laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* spectrum = app.add_subcommand(
        "spectrum", "Singular-value survey of aggregation matrices Q and QN");
    auto* verify = app.add_subcommand(
        "verify-props", "Degeneracy checks on regular and complete graphs");
    auto* testbed = app.add_subcommand(
        "linear-testbed", "Linear regression convergence-rate comparison");
    auto* train = app.add_subcommand("train", "Train GNN classifiers");
    auto* noise = app.add_subcommand(
        "noise-probe", "Batch-vs-dataset statistics at a BatchNorm input");
    for (CLI::App* sub : {spectrum, verify, testbed, train, noise}) add_common(sub, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        gnorm::RunConfig cfg = build_config(opts);
        if (spectrum->parsed()) return gnorm::cmd_spectrum(cfg);
        if (verify->parsed()) return gnorm::cmd_verify_props(cfg);
        if (testbed->parsed()) return gnorm::cmd_linear_testbed(cfg);
        if (train->parsed()) return gnorm::cmd_train(cfg);
        if (noise->parsed()) return gnorm::cmd_noise_probe(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
