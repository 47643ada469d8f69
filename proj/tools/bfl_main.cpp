#include "bfl/config.hpp"
#include "bfl/runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <sstream>

namespace {

std::string default_stamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::gmtime(&t));
    return buf;
}

bfl::config::RunConfig load_config(const std::string& path, std::uint64_t* seed_override) {
    bfl::config::RunConfig cfg =
        path.empty() ? bfl::config::parse_config("{}") : bfl::config::parse_config_file(path);
    if (seed_override) cfg.seed = *seed_override;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bfl: a numerical laboratory for a non-isothermal Brinkman gas model"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    app.add_option("--config", config_path, "configuration file (JSON)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for randomized test families")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--threads", threads, "worker threads for sweeps")->default_val(1);

    auto* cmd_sim = app.add_subcommand("simulate", "run a simulation from a config file");

    auto* cmd_derive =
        app.add_subcommand("derive-check", "verify the thermodynamic identity suite");
    bool self_test_negative = false;
    cmd_derive->add_flag("--self-test-negative", self_test_negative,
                         "corrupt a test model to demonstrate detector sensitivity");

    auto* cmd_sweep = app.add_subcommand("sweep", "convergence sweep around a base config");
    std::string axis;
    std::vector<double> values;
    std::string stamp = default_stamp();
    cmd_sweep->add_option("--axis", axis, "mesh | eps | delta | dt")->required();
    cmd_sweep->add_option("--values", values, "strictly descending axis values")
        ->required()
        ->delimiter(',');
    cmd_sweep->add_option("--stamp", stamp, "output filename stamp (default: UTC time)");

    auto* cmd_mms = app.add_subcommand("mms", "manufactured-solution verification");
    std::vector<int> resolutions;
    bool diffusive = false;
    cmd_mms->add_option("--resolutions", resolutions, "increasing cell counts")
        ->required()
        ->delimiter(',');
    cmd_mms->add_flag("--diffusive", diffusive, "diffusion-dominated manufactured state");
    cmd_mms->add_option("--stamp", stamp, "output filename stamp (default: UTC time)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return bfl::runner::kExitUsage;
    }

    try {
        if (*cmd_derive) {
            return bfl::runner::derive_check(std::cout, self_test_negative,
                                             seed_given ? seed : 0);
        }

        bfl::config::RunConfig cfg;
        try {
            cfg = load_config(config_path, seed_given ? &seed : nullptr);
        } catch (const bfl::config::ConfigError& e) {
            std::cerr << e.what() << "\n";
            return bfl::runner::kExitUsage;
        } catch (const std::ios_base::failure& e) {
            std::cerr << e.what() << "\n";
            return bfl::runner::kExitIoError;
        }

        if (*cmd_sim) return bfl::runner::simulate(cfg, out_dir);
        if (*cmd_sweep)
            return bfl::runner::sweep(cfg, axis, values, out_dir, stamp, threads);
        if (*cmd_mms) return bfl::runner::mms(resolutions, diffusive, out_dir, stamp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bfl::runner::kExitCheckFailure;
    }
    return bfl::runner::kExitUsage;
}
