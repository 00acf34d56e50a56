#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nf/geometry.hpp"
#include "nf/history.hpp"
#include "nf/models.hpp"

namespace nf::network {

/// P populations; neurons of population g occupy the contiguous index range
/// [offsets[g], offsets[g] + sizes[g]).
struct PopulationLayout {
    std::vector<std::size_t> sizes;
    std::vector<double> locations;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> neuron_population;

    std::size_t population_count() const { return sizes.size(); }
    std::size_t total() const { return neuron_population.size(); }
};

/// Layout with locations drawn from the domain measure.
PopulationLayout build_layout(std::size_t population_count, const std::vector<std::size_t>& sizes,
                              const geometry::SpatialDomain& domain, std::uint64_t seed);

/// Layout with user-fixed locations (wrapped into [0, 1)).
PopulationLayout layout_with_locations(const std::vector<std::size_t>& sizes,
                                       const std::vector<double>& locations);

/// Equal population sizes, as close as possible: the first N mod P
/// populations get one extra neuron.
std::vector<std::size_t> equal_sizes(std::size_t neurons, std::size_t populations);

/// e(N) = (1/P) sum_g 1/N_g.
double effective_scale(const PopulationLayout& layout);

/// Law of the initial path on [-tau, 0], per location. Constant and Gaussian
/// laws draw one constant path per neuron; Path is deterministic.
struct InitLaw {
    enum class Kind { Constant, Gaussian, Path };
    Kind kind = Kind::Constant;
    std::vector<double> value;                                   ///< Constant
    std::function<double(double r, std::size_t comp)> mean;      ///< Gaussian
    std::vector<double> variance;                                ///< Gaussian, per component
    std::function<double(double r, std::size_t comp, double t)> path;  ///< Path

    static InitLaw constant(std::vector<double> value);
    static InitLaw gaussian(std::function<double(double, std::size_t)> mean,
                            std::vector<double> variance);
    static InitLaw gaussian(std::vector<double> mean, std::vector<double> variance);
    static InitLaw from_path(std::function<double(double, std::size_t, double)> path);
};

/// Per-neuron initial data: one constant vector per neuron, or a path.
struct InitialState {
    std::size_t dim = 1;
    std::vector<double> constants;  ///< N * dim, unused for Path laws
    std::function<double(std::size_t neuron, std::size_t comp, double t)> path;

    double value(std::size_t neuron, std::size_t comp, double t) const;
};

/// Independent draws across neurons; neurons of one population share a law.
InitialState sample_initial(const PopulationLayout& layout, std::size_t dim, const InitLaw& law,
                            std::uint64_t seed);

/// Per-neuron history buffer (channel = neuron * dim + comp) primed with
/// chaotic initial data.
HistoryBuffer init_chaotic(const PopulationLayout& layout, std::size_t dim, const InitLaw& law,
                           std::uint64_t seed, double dt, double horizon);

/// Value of neuron j's state component at time t.
double delayed_lookup(const HistoryBuffer& buffer, std::size_t dim, std::size_t neuron,
                      std::size_t comp, double t);

/// One Euler-Maruyama step of the full network with pairwise delayed
/// interactions read from the buffer (step-start states). `noise` holds
/// N * noise_dim standard normals. Returns the N * dim next states.
std::vector<double> step(const models::ModelSpec& model, const PopulationLayout& layout,
                         const geometry::Kernels& kernels, const HistoryBuffer& buffer, double t,
                         double dt, std::span<const double> noise);

enum class Engine { Auto, Pairwise, Aggregated };

struct SimConfig {
    double dt = 1e-3;
    double t_end = 0.0;
    std::uint64_t seed = 0;
    std::size_t record_stride = 1;
    Engine engine = Engine::Auto;
    /// Tag mixed into the seed of the initial-condition draws.
    std::uint64_t init_stream = 0x1d1;
};

/// Frames of N * dim states at the recorded times.
struct TrajectoryRecord {
    std::size_t neurons = 0;
    std::size_t dim = 1;
    std::vector<double> times;
    std::vector<double> states;

    std::size_t frames() const { return times.size(); }
    std::span<const double> frame(std::size_t k) const {
        return {states.data() + k * neurons * dim, neurons * dim};
    }
    double at(std::size_t k, std::size_t neuron, std::size_t comp = 0) const {
        return states[(k * neurons + neuron) * dim + comp];
    }
};

/// Runs the network over [0, t_end]. Noise for neuron i comes from stream
/// mix(seed, i), so results do not depend on the worker count. The
/// aggregated engine is used for factorized models unless Pairwise is forced.
TrajectoryRecord simulate(const models::ModelSpec& model, const PopulationLayout& layout,
                          const geometry::Kernels& kernels, const SimConfig& config,
                          const InitLaw& init);

/// Seed of the dynamics noise stream of neuron i.
std::uint64_t neuron_seed(std::uint64_t master, std::size_t neuron);

} // namespace nf::network
