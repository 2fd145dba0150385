// Command-line runner for the vacuum-fragility experiments.

#include "ssblab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char** argv) {
    namespace ex = ssblab::experiments;
    CLI::App app{"Decoherence of symmetric and symmetry-broken vacua"};
    app.require_subcommand(1);

    ex::CommandOptions opts;
    std::string out_dir;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides $SSBLAB_OUT_DIR)");
        sub->add_option("--seed", seed, "seed for randomized suites");
        sub->add_option("--threads", opts.threads, "worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);
    };
    CLI::App* run = app.add_subcommand("run", "run every point and write CSV/JSON results");
    CLI::App* verify = app.add_subcommand("verify", "run the certificate suite; exit 0 iff all pass");
    CLI::App* sweep = app.add_subcommand("sweep", "scaling sweep with log-log fits");
    app.add_subcommand("schema", "print the config schema and CSV column docs");
    add_common(run);
    add_common(verify);
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ex::kExitConfig;
    }

    for (CLI::App* sub : {run, verify, sweep}) {
        if (!sub->parsed()) continue;
        if (sub->count("--out")) opts.out = out_dir;
        if (sub->count("--seed")) opts.seed = seed;
    }
    if (opts.threads == 0) opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    if (run->parsed()) return ex::command_run(opts, std::cout, std::cerr);
    if (verify->parsed()) return ex::command_verify(opts, std::cout, std::cerr);
    if (sweep->parsed()) return ex::command_sweep(opts, std::cout, std::cerr);
    return ex::command_schema(std::cout);
}
