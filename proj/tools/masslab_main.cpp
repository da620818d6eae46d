// masslab scenario runner.
//
// Usage: masslab run <config-path> [--out <dir>] [--quiet] [--snapshots]
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error,
// 3 runtime error. The output directory resolves as
// --out > $MASSLAB_OUT_DIR > [output] dir = ... > ./masslab_out.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "masslab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"masslab: mass-superposition frame-covariance laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    bool quiet = false;
    bool snapshots = false;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a scenario file");
    run_cmd->add_option("config", config_path, "scenario configuration file")->required();
    run_cmd->add_option("--out", out_flag, "output directory");
    run_cmd->add_flag("--quiet", quiet, "suppress the report on stdout");
    run_cmd->add_flag("--snapshots", snapshots, "write state snapshots next to the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const masslab::ScenarioConfig cfg = masslab::ScenarioConfig::parse_file(config_path);
        cfg.kind();  // validate the scenario selector early

        masslab::RunOptions options;
        options.quiet = quiet;
        options.snapshots = snapshots;
        if (!out_flag.empty()) {
            options.out_dir = out_flag;
        } else if (const char* env = std::getenv("MASSLAB_OUT_DIR"); env && *env) {
            options.out_dir = env;
        } else {
            options.out_dir = cfg.get_string("output.dir", "masslab_out");
        }
        return masslab::run_to_files(cfg, options);
    } catch (const masslab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}
