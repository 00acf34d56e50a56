#include "nf/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nf/error.hpp"

namespace nf::meanfield {

double gaussian_sigmoid_expectation(double g, double x, double y) {
    if (y < 0.0) throw InvalidArgument("variance y must be >= 0");
    return 0.5 * std::erf(g * x / std::sqrt(1.0 + g * g * y) / std::numbers::sqrt2);
}

MomentParams MomentParams::from(const models::FiringRateParams& p) {
    return {p.theta, p.gain, p.sigma, p.input};
}

namespace {

void check(const MomentParams& params, const geometry::Kernels& kernels, const MomentConfig& config) {
    if (!(params.theta > 0.0)) throw InvalidArgument("theta must be > 0");
    if (!(config.dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(config.t_end >= 0.0)) throw InvalidArgument("t_end must be >= 0");
    if (config.record_stride == 0) throw InvalidArgument("record_stride must be >= 1");
    if (kernels.delay.tau_s > 0.0 && config.dt > kernels.delay.tau_s * (1.0 + 1e-12))
        throw InvalidArgument("dt must not exceed tau_s");
}

double interp_periodic(std::span<const double> row, double r) {
    const std::size_t m = row.size();
    const double x = geometry::wrap(r) * static_cast<double>(m);
    const auto i = std::min(static_cast<std::size_t>(x), m - 1);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * row[i] + w * row[(i + 1) % m];
}

double field_at(const MomentField& f, const std::vector<double>& data, double r, double t) {
    const auto& ts = f.times;
    if (ts.empty()) throw InvalidArgument("empty moment field");
    auto row = [&](std::size_t k) { return std::span<const double>(data.data() + k * f.nodes(), f.nodes()); };
    if (t <= ts.front()) return interp_periodic(row(0), r);
    if (t >= ts.back()) return interp_periodic(row(ts.size() - 1), r);
    const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - w) * interp_periodic(row(lo), r) + w * interp_periodic(row(hi), r);
}

} // namespace

double MomentField::mean_at(double r, double t) const { return field_at(*this, mean, r, t); }
double MomentField::variance_at(double r, double t) const { return field_at(*this, variance, r, t); }

MomentState make_moment_state(const geometry::Kernels& kernels, const MomentConfig& config) {
    auto grid = geometry::build_grid({}, config.grid_size);
    const std::size_t m = grid.size();
    auto nodes = grid.nodes;
    auto mean = config.initial_mean;
    auto var = config.initial_variance;
    HistoryBuffer history(2 * m, config.dt, kernels.delay.tau_max(),
                          [nodes, mean, var, m](std::size_t ch, double t) {
                              return ch < m ? mean(nodes[ch], t) : var(nodes[ch - m], t);
                          });
    return {std::move(grid), std::move(history)};
}

MomentRows step_moments(const MomentState& state, const MomentParams& params,
                        const geometry::Kernels& kernels, double t, double dt) {
    const auto& grid = state.grid;
    const std::size_t m = grid.size();
    const auto now = state.history.current();
    MomentRows out;
    out.mean.resize(m);
    out.variance.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = grid.nodes[i];
        double integral = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double r2 = grid.nodes[j];
            const double td = t - kernels.delay(r, r2);
            const double md = state.history.lookup(j, td);
            const double vd = std::max(0.0, state.history.lookup(m + j, td));
            integral += grid.weights[j] * kernels.connectivity(r, r2) *
                        gaussian_sigmoid_expectation(params.gain, md, vd);
        }
        const double input = params.input ? params.input(r, t) : 0.0;
        out.mean[i] = now[i] + dt * (-now[i] / params.theta + input + integral);
        double v = now[m + i] + dt * (-2.0 * now[m + i] / params.theta + params.sigma * params.sigma);
        if (v < 0.0) {
            v = 0.0;
            ++out.clamped;
        }
        out.variance[i] = v;
    }
    return out;
}

MomentField solve_moments(const MomentParams& params, const geometry::Kernels& kernels,
                          const MomentConfig& config) {
    check(params, kernels, config);
    MomentField field;
    field.grid = geometry::build_grid({}, config.grid_size);
    const std::size_t m = field.grid.size();
    const double dt = config.dt;
    const auto& nodes = field.grid.nodes;

    // Offsets o = (j - i) mod m share distance, coupling weight and delay.
    struct Offset {
        double w_now;    // weight on row n - lag
        double w_next;   // weight on row n - lag + 1
        std::size_t lag;
    };
    std::vector<Offset> offsets(m);
    std::size_t max_lag = 0;
    for (std::size_t o = 0; o < m; ++o) {
        const double d = geometry::circle_distance(0.0, nodes[o]);
        const double wj = field.grid.weights[o] * kernels.connectivity.at_distance(d);
        const double steps = kernels.delay.at_distance(d) / dt;
        double lag = std::ceil(steps);
        if (lag - steps > 1.0 - 1e-9) lag -= 1.0;
        double frac = lag - steps;
        if (frac < 1e-9) frac = 0.0;
        offsets[o] = {wj * (1.0 - frac), wj * frac, static_cast<std::size_t>(lag)};
        max_lag = std::max(max_lag, offsets[o].lag);
    }

    // Ring of F rows; row index n maps to slot (n + pre) % cap so the initial
    // segment n in [-pre, 0] is addressable.
    const std::size_t pre = max_lag + 1;
    const std::size_t cap = pre + 2;
    std::vector<double> ring(cap * m);
    auto slot = [&](long n) -> double* {
        return ring.data() + static_cast<std::size_t>((n + static_cast<long>(pre)) % static_cast<long>(cap)) * m;
    };

    std::vector<double> mean(m), var(m);
    const std::size_t stride = config.record_stride;
    for (long n = -static_cast<long>(pre); n <= 0; ++n) {
        const double t = static_cast<double>(n) * dt;
        double* row = slot(n);
        for (std::size_t i = 0; i < m; ++i) {
            const double mu = config.initial_mean(nodes[i], t);
            const double v = std::max(0.0, config.initial_variance(nodes[i], t));
            row[i] = gaussian_sigmoid_expectation(params.gain, mu, v);
            if (n == 0) {
                mean[i] = mu;
                var[i] = v;
            }
        }
        if (n < 0 && (-n) % static_cast<long>(stride) == 0 && t >= -kernels.delay.tau_max() - 1e-12) {
            field.history_times.push_back(t);
            for (std::size_t i = 0; i < m; ++i) {
                field.history_mean.push_back(config.initial_mean(nodes[i], t));
                field.history_variance.push_back(config.initial_variance(nodes[i], t));
            }
        }
    }
    auto record = [&](double t) {
        field.times.push_back(t);
        field.mean.insert(field.mean.end(), mean.begin(), mean.end());
        field.variance.insert(field.variance.end(), var.begin(), var.end());
    };
    record(0.0);

    const auto steps = static_cast<long>(std::llround(config.t_end / dt));
    const double sigma2 = params.sigma * params.sigma;
    const double inv_theta = 1.0 / params.theta;
    std::vector<double> acc(m);
    for (long n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t o = 0; o < m; ++o) {
            const Offset& off = offsets[o];
            const double* a = slot(n - static_cast<long>(off.lag));
            const std::size_t split = m - o;
            if (off.w_next == 0.0) {
                for (std::size_t i = 0; i < split; ++i) acc[i] += off.w_now * a[i + o];
                for (std::size_t i = split; i < m; ++i) acc[i] += off.w_now * a[i + o - m];
            } else {
                const double* b = slot(n - static_cast<long>(off.lag) + 1);
                for (std::size_t i = 0; i < split; ++i) acc[i] += off.w_now * a[i + o] + off.w_next * b[i + o];
                for (std::size_t i = split; i < m; ++i)
                    acc[i] += off.w_now * a[i + o - m] + off.w_next * b[i + o - m];
            }
        }
        double* next_f = slot(n + 1);
        for (std::size_t i = 0; i < m; ++i) {
            const double input = params.input ? params.input(nodes[i], t) : 0.0;
            mean[i] += dt * (-inv_theta * mean[i] + input + acc[i]);
            double v = var[i] + dt * (-2.0 * inv_theta * var[i] + sigma2);
            if (v < 0.0) {
                v = 0.0;
                ++field.clamped_variance;
            }
            var[i] = v;
            if (!std::isfinite(mean[i])) throw BlowUp("moment solution became non-finite", t + dt, i);
            next_f[i] = gaussian_sigmoid_expectation(params.gain, mean[i], var[i]);
        }
        if ((n + 1) % static_cast<long>(stride) == 0) record(static_cast<double>(n + 1) * dt);
    }
    return field;
}

double oscillation_amplitude(const MomentField& field, double t_from) {
    double best = 0.0;
    for (std::size_t i = 0; i < field.nodes(); ++i) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t k = 0; k < field.frames(); ++k) {
            if (field.times[k] < t_from) continue;
            const double v = field.mean[k * field.nodes() + i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi >= lo) best = std::max(best, 0.5 * (hi - lo));
    }
    return best;
}

double final_sup_mean(const MomentField& field) {
    if (field.frames() == 0) return 0.0;
    const auto row = field.mean_row(field.frames() - 1);
    double s = 0.0;
    for (double v : row) s = std::max(s, std::abs(v));
    return s;
}

} // namespace nf::meanfield
