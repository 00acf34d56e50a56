#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nftools/run.hpp"

namespace nftools {

int main_cli(int argc, char** argv) {
    CLI::App app{"nflab: delayed stochastic neural field experiments"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    app.set_version_flag("--version", kVersion);

    for (const char* name : {"simulate", "moments", "picard", "dispersion", "hopf-curve", "chaos-scan"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_dir, "output directory");
    }
    CLI11_PARSE(app, argc, argv);
    const auto* sub = app.get_subcommands().front();

    std::ifstream f(config_path);
    if (!f) {
        std::cerr << nlohmann::json{{"error", "io"}, {"message", "cannot read " + config_path}}.dump() << "\n";
        return 1;
    }
    std::stringstream text;
    text << f.rdbuf();
    ExperimentConfig config;
    try {
        config = parse_config(text.str());
    } catch (const ConfigError& e) {
        std::cerr << nlohmann::json{{"error", "config"}, {"key", e.key()}, {"constraint", e.constraint()},
                                    {"message", e.what()}}.dump()
                  << "\n";
        return 2;
    }
    if (config.experiment != sub->get_name()) {
        std::cerr << nlohmann::json{{"error", "config"},
                                    {"key", "experiment"},
                                    {"message", "config is a '" + config.experiment + "' experiment, not '" +
                                                    sub->get_name() + "'"}}.dump()
                  << "\n";
        return 2;
    }
    RunOptions options;
    options.out_dir = out_dir;
    if (sub->count("--seed")) options.seed = seed;
    const auto result = run(config, options, std::cerr);
    if (result.status == 0)
        for (const auto& o : result.outputs) std::cout << (options.out_dir / o).string() << "\n";
    return result.status;
}

} // namespace nftools
