#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nftools {

/// Raised for unknown keys, missing keys and out-of-range values.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, std::string constraint, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)), constraint_(std::move(constraint)) {}
    const std::string& key() const { return key_; }
    const std::string& constraint() const { return constraint_; }

private:
    std::string key_;
    std::string constraint_;
};

struct GeometryConfig {
    double j_bar = -3.0;
    double delta = 1.0;
    double c = 1.0;
    double tau_s = 0.4;
    bool operator==(const GeometryConfig&) const = default;
};

struct NeuronConfig {
    double theta = 1.0;
    double gain = 3.0;
    double sigma = 0.1;
    double input = 0.0;
    // FitzHugh-Nagumo
    double fn_a = 0.08;
    double fn_b = 0.8;
    double sigma_w = 0.0;
    // synapse (FitzHugh-Nagumo and Hodgkin-Huxley)
    double v_rev = 0.0;
    // Hodgkin-Huxley
    double channel_count = 1.0;
    bool operator==(const NeuronConfig&) const = default;
};

struct NumericsConfig {
    double dt = 1e-2;
    double t_end = 10.0;
    std::uint64_t grid = 256;
    std::uint64_t record_stride = 10;
    bool operator==(const NumericsConfig&) const = default;
};

struct NetworkConfig {
    std::uint64_t neurons = 256;
    std::uint64_t populations = 16;
    std::string engine = "auto";
    bool binary = false;
    bool operator==(const NetworkConfig&) const = default;
};

/// Initial law on [-tau_max, 0]: constant-in-time per neuron / per node.
/// "clusters" puts +amplitude on [0, 0.5) and -amplitude on [0.5, 1).
struct InitConfig {
    std::string kind = "gaussian";
    double mean = 0.2;
    double variance = 0.005;
    double amplitude = 0.2;
    bool operator==(const InitConfig&) const = default;
};

struct DispersionConfig {
    std::vector<double> tau_s_values;  ///< empty: geometry.tau_s only
    std::int64_t k_min = 0;
    std::int64_t k_max = 0;
    double re_min = -5.0, re_max = 2.0, im_min = -50.0, im_max = 50.0;
    std::string symbol = "circle";
    bool operator==(const DispersionConfig&) const = default;
};

struct HopfConfig {
    std::int64_t k_min = 0, k_max = 0;
    std::int64_t m_min = 0, m_max = 0;
    double omega_min = 0.05;
    double omega_max = 10.0;
    std::uint64_t omega_count = 200;
    bool operator==(const HopfConfig&) const = default;
};

struct PicardConfigFile {
    std::uint64_t particles = 20000;
    std::uint64_t locations = 32;
    std::uint64_t iterations = 6;
    bool operator==(const PicardConfigFile&) const = default;
};

struct ScanConfig {
    std::vector<std::uint64_t> neurons{256, 1024};
    std::uint64_t populations = 0;  ///< 0: ceil(sqrt(N))
    std::uint64_t layout_replicas = 8;
    std::uint64_t noise_replicas = 4;
    double moment_dt = 1e-3;
    bool operator==(const ScanConfig&) const = default;
};

struct ExperimentConfig {
    std::string experiment;
    std::string model = "firing_rate";
    std::uint64_t seed = 0;
    GeometryConfig geometry;
    NeuronConfig neuron;
    NumericsConfig numerics;
    NetworkConfig network;
    InitConfig init;
    DispersionConfig dispersion;
    HopfConfig hopf;
    PicardConfigFile picard;
    ScanConfig scan;
    bool operator==(const ExperimentConfig&) const = default;
};

/// JSON text with tables geometry, neuron, numerics, network, init,
/// dispersion, hopf, picard, scan. Only "experiment" is required.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

/// Closest candidate by edit distance, empty if nothing is close.
std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates);

} // namespace nftools
