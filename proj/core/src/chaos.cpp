#include "nf/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nf/error.hpp"
#include "nf/random.hpp"

namespace nf::chaos {

PopulationMoments population_moments(const network::TrajectoryRecord& record,
                                     const network::PopulationLayout& layout, std::size_t comp) {
    if (record.neurons != layout.total())
        throw InvalidArgument("record and layout disagree on the neuron count");
    if (comp >= record.dim) throw InvalidArgument("component out of range");
    const std::size_t P = layout.population_count();
    const std::size_t F = record.frames();
    PopulationMoments out;
    out.times = record.times;
    out.populations = P;
    out.mean.assign(F * P, 0.0);
    out.variance.assign(F * P, std::numeric_limits<double>::quiet_NaN());
    out.has_variance.resize(P);
    for (std::size_t g = 0; g < P; ++g) out.has_variance[g] = layout.sizes[g] > 1;

    for (std::size_t k = 0; k < F; ++k) {
        for (std::size_t g = 0; g < P; ++g) {
            const std::size_t n = layout.sizes[g];
            const std::size_t first = layout.offsets[g];
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += record.at(k, first + i, comp);
            mean /= static_cast<double>(n);
            out.mean[k * P + g] = mean;
            if (n < 2) continue;
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = record.at(k, first + i, comp) - mean;
                ss += d * d;
            }
            out.variance[k * P + g] = ss / static_cast<double>(n - 1);
        }
    }
    return out;
}

double moment_mismatch(const PopulationMoments& empirical, const meanfield::MomentField& meanfield,
                       const network::PopulationLayout& layout) {
    const std::size_t P = empirical.populations;
    if (P != layout.population_count()) throw InvalidArgument("layout and moments disagree on P");
    double sup = 0.0;
    for (std::size_t k = 0; k < empirical.times.size(); ++k) {
        const double t = empirical.times[k];
        double acc = 0.0;
        for (std::size_t g = 0; g < P; ++g) {
            const double r = layout.locations[g];
            const double dm = empirical.mean_at(k, g) - meanfield.mean_at(r, t);
            acc += dm * dm;
            if (empirical.has_variance[g]) {
                const double dv = empirical.variance_at(k, g) - meanfield.variance_at(r, t);
                acc += dv * dv;
            }
        }
        sup = std::max(sup, acc / static_cast<double>(P));
    }
    return sup;
}

std::vector<double> time_averages(const network::TrajectoryRecord& record, double t_from, double t_to,
                                  std::size_t comp) {
    if (comp >= record.dim) throw InvalidArgument("component out of range");
    std::vector<double> avg(record.neurons, 0.0);
    std::size_t used = 0;
    for (std::size_t k = 0; k < record.frames(); ++k) {
        const double t = record.times[k];
        if (t < t_from - 1e-12 || t > t_to + 1e-12) continue;
        ++used;
        for (std::size_t i = 0; i < record.neurons; ++i) avg[i] += record.at(k, i, comp);
    }
    if (used == 0) throw InvalidArgument("averaging window contains no recorded frame");
    for (auto& a : avg) a /= static_cast<double>(used);
    return avg;
}

std::vector<std::optional<double>> correlation_scan(const std::vector<std::vector<double>>& samples,
                                                    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const std::size_t R = samples.size();
    std::vector<std::optional<double>> out;
    out.reserve(pairs.size());
    if (R < 2) {
        out.assign(pairs.size(), std::nullopt);
        return out;
    }
    for (const auto& [a, b] : pairs) {
        double ma = 0.0, mb = 0.0;
        for (const auto& s : samples) {
            if (a >= s.size() || b >= s.size()) throw InvalidArgument("pair index out of range");
            ma += s[a];
            mb += s[b];
        }
        ma /= static_cast<double>(R);
        mb /= static_cast<double>(R);
        double saa = 0.0, sbb = 0.0, sab = 0.0;
        for (const auto& s : samples) {
            const double da = s[a] - ma, db = s[b] - mb;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
        if (saa <= 0.0 || sbb <= 0.0) {
            out.push_back(std::nullopt);
            continue;
        }
        out.push_back(sab / std::sqrt(saa * sbb));
    }
    return out;
}

double median_abs(const std::vector<std::optional<double>>& values) {
    std::vector<double> v;
    for (const auto& x : values)
        if (x) v.push_back(std::abs(*x));
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

double equal_scale(std::size_t N, std::size_t P) {
    const auto sizes = network::equal_sizes(N, P);
    double e = 0.0;
    for (auto s : sizes) e += 1.0 / static_cast<double>(s);
    return e / static_cast<double>(P);
}

} // namespace

ScanSchedule sqrt_schedule(const std::vector<std::size_t>& neurons, std::size_t layout_replicas,
                           std::size_t noise_replicas, std::uint64_t seed) {
    ScanSchedule s;
    s.layout_replicas = layout_replicas;
    s.noise_replicas = noise_replicas;
    s.seed = seed;
    for (auto N : neurons) {
        if (N == 0) throw InvalidArgument("schedule point needs N >= 1");
        const auto P = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(N))));
        const double here = equal_scale(N, P) + 1.0 / static_cast<double>(P);
        for (std::size_t alt : {P / 2, 2 * P}) {
            if (alt == 0 || alt > N) continue;
            const double other = equal_scale(N, alt) + 1.0 / static_cast<double>(alt);
            if (other < here - 1e-12)
                throw std::logic_error("schedule: P = ceil(sqrt(N)) does not balance e(N) against 1/P");
        }
        s.points.push_back({N, P, network::equal_sizes(N, P)});
    }
    return s;
}

ScanSchedule fixed_schedule(const std::vector<std::size_t>& neurons, std::size_t populations,
                            std::size_t layout_replicas, std::size_t noise_replicas, std::uint64_t seed) {
    ScanSchedule s;
    s.layout_replicas = layout_replicas;
    s.noise_replicas = noise_replicas;
    s.seed = seed;
    for (auto N : neurons) {
        if (N < populations) throw InvalidArgument("schedule point needs N >= P");
        s.points.push_back({N, populations, network::equal_sizes(N, populations)});
    }
    return s;
}

void fit_slope(ConvergenceReport& report) {
    report.fitted = false;
    if (report.rows.size() < 3) return;
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& row : report.rows) {
        if (!(row.mismatch > 0.0)) return;
        const double x = std::log(static_cast<double>(row.neurons));
        const double y = std::log(row.mismatch);
        // var(log m) ~ (stderr / m)^2
        const double rel = row.mismatch_stderr / row.mismatch;
        const double w = rel > 0.0 ? 1.0 / (rel * rel) : 1.0;
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) return;
    report.slope = (sw * sxy - sx * sy) / det;
    report.intercept = (sxx * sy - sx * sxy) / det;
    report.slope_stderr = std::sqrt(sw / det);
    report.fitted = true;
}

ConvergenceReport convergence_scan(const ScanSchedule& schedule, const models::ModelSpec& model,
                                   const geometry::Kernels& kernels, const meanfield::MomentField& reference,
                                   const ScanSimulation& sim) {
    if (schedule.layout_replicas == 0 || schedule.noise_replicas == 0)
        throw InvalidArgument("scan needs at least one replica of each kind");
    ConvergenceReport report;
    const geometry::SpatialDomain domain;
    for (std::size_t p = 0; p < schedule.points.size(); ++p) {
        const auto& pt = schedule.points[p];
        std::vector<double> values;
        double e_sum = 0.0;
        for (std::size_t l = 0; l < schedule.layout_replicas; ++l) {
            const auto layout_seed = random::mix(random::mix(schedule.seed, p), 2 * l);
            const auto layout = network::build_layout(pt.populations, pt.sizes, domain, layout_seed);
            e_sum += network::effective_scale(layout);
            for (std::size_t q = 0; q < schedule.noise_replicas; ++q) {
                network::SimConfig cfg;
                cfg.dt = sim.dt;
                cfg.t_end = sim.t_end;
                cfg.record_stride = sim.record_stride;
                cfg.seed = random::mix(layout_seed, 2 * q + 1);
                const auto rec = network::simulate(model, layout, kernels, cfg, sim.init);
                values.push_back(moment_mismatch(population_moments(rec, layout), reference, layout));
            }
        }
        const double n = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var = values.size() > 1 ? var / (n - 1.0) : 0.0;
        report.rows.push_back({pt.neurons, pt.populations, e_sum / static_cast<double>(schedule.layout_replicas),
                               mean, std::sqrt(var / n)});
    }
    fit_slope(report);
    return report;
}

} // namespace nf::chaos
