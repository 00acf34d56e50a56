#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nf/geometry.hpp"
#include "nf/history.hpp"
#include "nf/models.hpp"

namespace nf::meanfield {

/// F(x, y) = E[S(g U)], U ~ N(x, y), for the standard-normal sigmoid:
/// Phi(g x / sqrt(1 + g^2 y)) - 1/2.
double gaussian_sigmoid_expectation(double g, double x, double y);

/// Parameters of the Gaussian moment equations (firing-rate model).
struct MomentParams {
    double theta = 1.0;
    double gain = 3.0;
    double sigma = 0.0;
    models::InputFn input;  ///< empty means I == 0

    static MomentParams from(const models::FiringRateParams& p);
};

struct MomentConfig {
    std::size_t grid_size = 256;
    double dt = 1e-3;
    double t_end = 0.0;
    std::size_t record_stride = 1;
    /// Initial mean and variance on [-tau_max, 0].
    std::function<double(double r, double t)> initial_mean = [](double, double) { return 0.0; };
    std::function<double(double r, double t)> initial_variance = [](double, double) { return 0.0; };
};

/// Mean M(r, t) and variance v(r, t) on the quadrature grid at recorded
/// times. Row k of `mean` / `variance` holds time times[k].
struct MomentField {
    geometry::QuadratureGrid grid;
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> variance;
    /// Initial segment on the same spatial grid, at times history_times.
    std::vector<double> history_times;
    std::vector<double> history_mean;
    std::vector<double> history_variance;
    /// Number of times a negative variance was clamped to zero.
    std::size_t clamped_variance = 0;

    std::size_t nodes() const { return grid.size(); }
    std::size_t frames() const { return times.size(); }
    std::span<const double> mean_row(std::size_t k) const { return {mean.data() + k * nodes(), nodes()}; }
    std::span<const double> variance_row(std::size_t k) const {
        return {variance.data() + k * nodes(), nodes()};
    }

    /// Linear interpolation in time between recorded frames and periodic
    /// linear interpolation in space between grid nodes.
    double mean_at(double r, double t) const;
    double variance_at(double r, double t) const;
};

/// Literal stepping state: grid plus a history buffer of width 2M holding
/// (M_0..M_{M-1}, v_0..v_{M-1}).
struct MomentState {
    geometry::QuadratureGrid grid;
    HistoryBuffer history;
};

MomentState make_moment_state(const geometry::Kernels& kernels, const MomentConfig& config);

struct MomentRows {
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t clamped = 0;
};

/// One explicit Euler step of the moment equations. Delayed mean and
/// variance are read pairwise from the history with linear time
/// interpolation and passed through F. Cost O(M^2) evaluations of F.
MomentRows step_moments(const MomentState& state, const MomentParams& params,
                        const geometry::Kernels& kernels, double t, double dt);

/// Full solve over [0, t_end]. Equivalent to repeated step_moments but
/// caches F on the history rows and evaluates the delayed integral as a
/// circular convolution, so each step costs O(M^2) multiply-adds and O(M)
/// evaluations of F.
MomentField solve_moments(const MomentParams& params, const geometry::Kernels& kernels,
                          const MomentConfig& config);

/// Half peak-to-peak amplitude of M(r_node, t) over recorded t >= t_from,
/// maximized over nodes.
double oscillation_amplitude(const MomentField& field, double t_from);

/// max_r |M(r, t)| at the last recorded frame.
double final_sup_mean(const MomentField& field);

} // namespace nf::meanfield
