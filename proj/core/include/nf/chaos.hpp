#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nf/geometry.hpp"
#include "nf/models.hpp"
#include "nf/moments.hpp"
#include "nf/network.hpp"

namespace nf::chaos {

/// Per-population sample mean and unbiased variance of one state component
/// at every recorded time. Variance is absent (NaN) for singleton
/// populations.
struct PopulationMoments {
    std::vector<double> times;
    std::size_t populations = 0;
    std::vector<double> mean;      ///< frames x P
    std::vector<double> variance;  ///< frames x P
    std::vector<bool> has_variance;

    double mean_at(std::size_t frame, std::size_t pop) const { return mean[frame * populations + pop]; }
    double variance_at(std::size_t frame, std::size_t pop) const { return variance[frame * populations + pop]; }
};

PopulationMoments population_moments(const network::TrajectoryRecord& record,
                                     const network::PopulationLayout& layout, std::size_t comp = 0);

/// sup over recorded times of the population average of
/// (mean - M(r_g, t))^2 + (variance - v(r_g, t))^2, the mean-field values
/// interpolated to the population location and record time.
double moment_mismatch(const PopulationMoments& empirical, const meanfield::MomentField& meanfield,
                       const network::PopulationLayout& layout);

/// Per-neuron average of component `comp` over recorded times in
/// [t_from, t_to].
std::vector<double> time_averages(const network::TrajectoryRecord& record, double t_from, double t_to,
                                  std::size_t comp = 0);

/// Pearson correlation across replicas for each neuron pair; `samples` is
/// replicas x neurons. Absent when either series has zero variance.
std::vector<std::optional<double>> correlation_scan(const std::vector<std::vector<double>>& samples,
                                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

double median_abs(const std::vector<std::optional<double>>& values);

struct ScanPoint {
    std::size_t neurons = 0;
    std::size_t populations = 0;
    std::vector<std::size_t> sizes;
};

struct ScanSchedule {
    std::vector<ScanPoint> points;
    std::size_t layout_replicas = 8;
    std::size_t noise_replicas = 4;
    std::uint64_t seed = 0;
};

/// Equal-size points with P = ceil(sqrt(N)). Checks on its own output that
/// e(N) + 1/P does not improve by halving or doubling P.
ScanSchedule sqrt_schedule(const std::vector<std::size_t>& neurons, std::size_t layout_replicas,
                           std::size_t noise_replicas, std::uint64_t seed);

/// Equal-size points with a fixed population count.
ScanSchedule fixed_schedule(const std::vector<std::size_t>& neurons, std::size_t populations,
                            std::size_t layout_replicas, std::size_t noise_replicas, std::uint64_t seed);

struct ConvergenceRow {
    std::size_t neurons = 0;
    std::size_t populations = 0;
    double e_n = 0.0;
    double mismatch = 0.0;
    double mismatch_stderr = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool fitted = false;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
};

struct ScanSimulation {
    double dt = 1e-2;
    double t_end = 20.0;
    std::size_t record_stride = 10;
    network::InitLaw init;
};

/// Weighted least squares of log(mismatch) on log(N), weights from the
/// per-point Monte-Carlo error. Needs at least 3 rows.
void fit_slope(ConvergenceReport& report);

/// Runs every schedule point over layout x noise replicas, measures the
/// moment mismatch against the reference mean-field solution, then fits the
/// log-log slope.
ConvergenceReport convergence_scan(const ScanSchedule& schedule, const models::ModelSpec& model,
                                   const geometry::Kernels& kernels, const meanfield::MomentField& reference,
                                   const ScanSimulation& sim);

} // namespace nf::chaos
