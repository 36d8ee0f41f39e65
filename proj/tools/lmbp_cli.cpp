#include "lmbp/config.hpp"
#include "lmbp/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Particle LMB/Poisson multiobject tracker: Monte-Carlo experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<std::string> out;
    std::optional<std::string> marginals;
    std::optional<int> threads;
    bool quiet = false;
    run->add_option("config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Master seed (overrides run.seed)");
    run->add_option("--runs", runs, "Monte-Carlo runs (overrides run.mc_runs)");
    run->add_option("--out", out, "Output directory (overrides run.out)");
    run->add_option("--marginals", marginals, "Association marginals: exact or bp")
        ->check(CLI::IsMember({"exact", "bp"}));
    run->add_option("--threads", threads, "Worker threads for independent runs");
    run->add_flag("--quiet", quiet, "Suppress progress output");

    CLI11_PARSE(app, argc, argv);

    try {
        lmbp::RunConfig config = lmbp::load_run_config(config_path);
        if (seed) config.seed = *seed;
        if (runs) config.mc_runs = *runs;
        if (out) config.out = *out;
        if (marginals) config.filter.marginals = lmbp::parse_marginal_method(*marginals);
        if (threads) config.threads = *threads;

        const auto summary = lmbp::run_experiment(config, quiet ? nullptr : &std::cerr);
        if (!quiet) {
            std::cout << "outputs written to " << config.out.string() << '\n';
            std::cout << "mean step time: " << 1e3 * summary.mean_step_seconds << " ms\n";
            std::cout << "mean track count: " << summary.mean_tracks << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
