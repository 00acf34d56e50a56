#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nf/geometry.hpp"
#include "nf/models.hpp"
#include "nf/moments.hpp"
#include "nf/network.hpp"
#include "nftools/config.hpp"

namespace nftools {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;  ///< overrides the config seed
};

struct RunResult {
    int status = 0;
    std::vector<std::string> outputs;  ///< file names relative to out_dir, manifest last
};

/// Runs the configured pipeline, writes every output into out_dir and then
/// manifest.json. Failures are reported as one JSON line on `err` with a
/// nonzero status.
RunResult run(const ExperimentConfig& config, const RunOptions& options, std::ostream& err);

// Builders shared with tests and benchmarks.
nf::geometry::Kernels make_kernels(const ExperimentConfig& c);
nf::models::ModelSpec make_model(const ExperimentConfig& c);
nf::network::InitLaw make_init_law(const ExperimentConfig& c);
nf::meanfield::MomentParams make_moment_params(const ExperimentConfig& c);
nf::meanfield::MomentConfig make_moment_config(const ExperimentConfig& c);

/// Entry point of the nflab executable.
int main_cli(int argc, char** argv);

} // namespace nftools
