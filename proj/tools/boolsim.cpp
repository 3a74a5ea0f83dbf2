#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "boolmodel/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = boolmodel::cli;
    CLI::App app{"Monte Carlo experiments on the Poisson Boolean model"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.require_subcommand(1);

    unsigned threads = cli::default_threads();

    auto* run = app.add_subcommand("run", "Run the experiments named in a JSON config");
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory for CSVs and manifest.json")->required();
    run->add_option("--seed", seed, "Override master_seed");
    run->add_option("--threads", threads, "Worker threads (default: $BOOLSIM_THREADS or 1)")
        ->check(CLI::Range(1u, 4096u));

    auto* oracle = app.add_subcommand("oracle", "Run the built-in differential oracles");
    std::string suite = "all";
    oracle->add_option("--suite", suite, "graph, chain, moments, astat or all");
    oracle->add_option("--threads", threads, "Worker threads (default: $BOOLSIM_THREADS or 1)")
        ->check(CLI::Range(1u, 4096u));

    CLI11_PARSE(app, argc, argv);

    if (*run) return cli::cmd_run(config, out_dir, seed, threads, std::cout, std::cerr);
    return cli::cmd_oracle(suite, threads, std::cout, std::cerr);
}
