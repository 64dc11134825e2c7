#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "floqsh/run.hpp"
#include "floqsh/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"floqsh: Floquet surface hopping and quantum master equation "
                 "for a driven donor-acceptor-metal model"};
    app.set_version_flag("--version", floqsh::kVersion);

    std::string config_path, method_override, out_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;

    CLI::App* run_cmd = app.add_subcommand("run", "Run a configured simulation");
    run_cmd->add_option("--config", config_path, "Path to the JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", seed_override, "Override ensemble.master_seed")
        ->each([&](const std::string&) { seed_given = true; });
    run_cmd->add_option("--method", method_override, "Override method (frsh|frqme|compare)");
    run_cmd->add_option("--out", out_override, "Override io.out output prefix");
    app.require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(config_path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        floqsh::RunConfig cfg = floqsh::parse_config(ss.str());
        if (seed_given) cfg.ensemble.master_seed = seed_override;
        if (!method_override.empty()) {
            if (method_override != "frsh" && method_override != "frqme" &&
                method_override != "compare")
                throw std::invalid_argument("--method: must be one of frsh, frqme, compare");
            cfg.method = method_override;
        }
        if (!out_override.empty()) cfg.io.out = out_override;
        if (const char* env = std::getenv("FLOQSH_WORKERS")) {
            const int w = std::atoi(env);
            if (w > 0) cfg.ensemble.worker_count = w;
        }
        floqsh::run(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
