#pragma once

#include <cstdint>
#include <vector>

#include "nf/geometry.hpp"
#include "nf/models.hpp"

namespace nf::meanfield {

struct PicardConfig {
    std::size_t particles_per_location = 625;
    double dt = 1e-2;
    double t_end = 4.0;
    std::uint64_t seed = 0;
    std::size_t record_stride = 10;
    /// Constant initial path per particle drawn from N(init_mean, init_variance).
    double init_mean = 0.0;
    double init_variance = 0.0;
};

/// Iterate k of the particle emulation of the mean-field fixed-point map.
/// Particles at location a occupy indices [a * n, (a + 1) * n).
struct PicardEnsemble {
    std::vector<double> locations;
    std::vector<double> weights;
    std::size_t particles_per_location = 0;
    std::size_t iteration = 0;
    /// Population average of pre(X^j(t)) per location, one row of K values
    /// per time step n = 0..steps (iteration `iteration`).
    std::vector<std::vector<double>> aggregates;
    /// Recorded times and per-location sample mean / variance of the first
    /// state component, frames x K.
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> variance;

    std::size_t particle_count() const { return locations.size() * particles_per_location; }
};

struct PicardReport {
    /// distances[k-1] = D_k = mean over particles of sup_t |X^k - X^{k-1}|^2.
    std::vector<double> distances;
    std::vector<double> seconds;
};

/// Emulates the fixed-point map on path laws with a finite ensemble: the
/// expectation over the independent copy is replaced by the previous
/// iterate's empirical average at each location, and the space integral by
/// the location weights. Iterate 0 is the uncoupled dynamics. Successive
/// iterates reuse the same per-particle noise streams and initial values, so
/// D_k is a pathwise distance.
class PicardSolver {
public:
    PicardSolver(models::ModelSpec model, geometry::Kernels kernels, std::vector<double> locations,
                 PicardConfig config);

    /// Location sample weights default to 1/K.
    const PicardEnsemble& ensemble() const { return current_; }
    const PicardReport& report() const { return report_; }

    /// Advances to the next iterate and appends D_k to the report.
    const PicardEnsemble& iterate();

private:
    /// Simulates every particle with the given input aggregates (null for the
    /// uncoupled iterate 0); optionally compares against a second run.
    void run(const std::vector<std::vector<double>>* input, const std::vector<std::vector<double>>* prev_input,
             PicardEnsemble& out, double* distance) const;

    models::ModelSpec model_;
    geometry::Kernels kernels_;
    PicardConfig config_;
    std::size_t steps_ = 0;
    std::vector<double> coupling_;   // K x K, weight * J(r_a, r_b)
    std::vector<double> lag_steps_;  // K x K, tau(r_a, r_b) / dt
    PicardEnsemble previous_;
    PicardEnsemble current_;
    bool has_previous_ = false;
    PicardReport report_;
};

} // namespace nf::meanfield
