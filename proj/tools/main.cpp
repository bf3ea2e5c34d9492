#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hetsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hetsim: multitasking traffic over a wired/wireless network"};
    app.require_subcommand(1);

    hetsim::cli::RunRequest run_req;
    std::string mode = "multitask";
    CLI::App* run = app.add_subcommand("run", "Run a scenario and emit CSV metrics");
    run->add_option("--config", run_req.config_path, "Scenario file path");
    run->add_option("--seed", run_req.seed, "Random seed (default 0)");
    run->add_option("--mode", mode, "multitask | single | compare")
        ->check(CLI::IsMember({"multitask", "single", "compare"}));
    run->add_option("--out", run_req.out, "Output file stem (default 'run')");
    run->add_option("--set", run_req.overrides, "Config override key=value, repeatable");

    hetsim::cli::SteadyRequest steady_req;
    CLI::App* steady =
        app.add_subcommand("steady", "Print a service chain's stationary distribution");
    steady->add_option("chain", steady_req.chain_path, "Chain text file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (mode == "single")
            run_req.mode = hetsim::cli::RunMode::single;
        else if (mode == "compare")
            run_req.mode = hetsim::cli::RunMode::compare;
        return hetsim::cli::run_command(run_req, std::cout, std::cerr);
    }
    return hetsim::cli::steady_command(steady_req, std::cout, std::cerr);
}
