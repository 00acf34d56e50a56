#include "nf/picard.hpp"

#include <chrono>
#include <cmath>

#include "nf/error.hpp"
#include "nf/parallel.hpp"
#include "nf/random.hpp"

namespace nf::meanfield {

namespace {
constexpr std::uint64_t kInitTag = 0x696e6974ULL;
constexpr std::uint64_t kNoiseTag = 0x706963ULL;
} // namespace

PicardSolver::PicardSolver(models::ModelSpec model, geometry::Kernels kernels, std::vector<double> locations,
                           PicardConfig config)
    : model_(std::move(model)), kernels_(kernels), config_(config) {
    if (!model_.factorized) throw InvalidArgument("Picard iteration needs a factorized interaction");
    if (locations.empty()) throw InvalidArgument("Picard iteration needs at least one location");
    if (config_.particles_per_location * locations.size() < 2)
        throw InvalidArgument("Picard ensemble needs at least 2 particles");
    if (config_.particles_per_location == 0) throw InvalidArgument("Picard ensemble needs particles at every location");
    if (!(config_.dt > 0.0) || !(config_.t_end > 0.0)) throw InvalidArgument("Picard needs dt > 0 and t_end > 0");
    if (config_.record_stride == 0) throw InvalidArgument("record_stride must be >= 1");
    if (kernels_.delay.tau_s > 0.0 && config_.dt > kernels_.delay.tau_s * (1.0 + 1e-12))
        throw InvalidArgument("dt must not exceed tau_s");
    steps_ = static_cast<std::size_t>(std::llround(config_.t_end / config_.dt));

    const std::size_t k = locations.size();
    for (double& r : locations) r = geometry::wrap(r);
    current_.locations = locations;
    current_.weights.assign(k, 1.0 / static_cast<double>(k));
    current_.particles_per_location = config_.particles_per_location;
    coupling_.resize(k * k);
    lag_steps_.resize(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            coupling_[a * k + b] = current_.weights[b] * model_.factorized->connectivity(locations[a], locations[b]);
            lag_steps_[a * k + b] = kernels_.delay(locations[a], locations[b]) / config_.dt;
        }

    run(nullptr, nullptr, current_, nullptr);
}

void PicardSolver::run(const std::vector<std::vector<double>>* input,
                       const std::vector<std::vector<double>>* prev_input, PicardEnsemble& out,
                       double* distance) const {
    const std::size_t k = out.locations.size();
    const std::size_t n_per = config_.particles_per_location;
    const std::size_t d = model_.dim, m = model_.noise_dim;
    const auto& fac = *model_.factorized;
    const double dt = config_.dt, sq = std::sqrt(dt);

    // Mean-field input per location and step, from the given aggregates.
    auto drive = [&](const std::vector<std::vector<double>>* agg) {
        std::vector<double> in((steps_ + 1) * k, 0.0);
        if (!agg) return in;
        for (std::size_t n = 0; n <= steps_; ++n)
            for (std::size_t a = 0; a < k; ++a) {
                double acc = 0.0;
                for (std::size_t b = 0; b < k; ++b) {
                    const double q = static_cast<double>(n) - lag_steps_[a * k + b];
                    double lo = std::floor(q + 1e-9);
                    double w = q - lo;
                    if (w < 1e-9) w = 0.0;
                    auto row = [&](double idx) { return (*agg)[idx < 0 ? 0 : static_cast<std::size_t>(idx)][b]; };
                    const double v = w == 0.0 ? row(lo) : (1.0 - w) * row(lo) + w * row(lo + 1.0);
                    acc += coupling_[a * k + b] * v;
                }
                in[n * k + a] = acc;
            }
        return in;
    };
    const std::vector<double> in_now = drive(input);
    const std::vector<double> in_prev = distance ? drive(prev_input) : std::vector<double>{};

    const std::size_t frames = steps_ / config_.record_stride + 1;
    out.aggregates.assign(steps_ + 1, std::vector<double>(k, 0.0));
    out.times.resize(frames);
    for (std::size_t f = 0; f < frames; ++f)
        out.times[f] = static_cast<double>(f * config_.record_stride) * dt;
    std::vector<double> sum(frames * k, 0.0), sum2(frames * k, 0.0);
    std::vector<double> sup_by_loc(k, 0.0);

#pragma omp parallel num_threads(parallel::thread_count())
    {
        std::vector<double> x(d), y(d), nx(d), f(d), g(d * m), post(d), xi(m);
#pragma omp for schedule(static)
        for (std::size_t a = 0; a < k; ++a) {
            const double r = out.locations[a];
            double sup_acc = 0.0;
            for (std::size_t j = 0; j < n_per; ++j) {
                const std::size_t p = a * n_per + j;
                random::NormalStream init(random::mix(config_.seed ^ kInitTag, p));
                for (std::size_t c = 0; c < d; ++c)
                    x[c] = (c == 0 ? config_.init_mean : 0.0) + std::sqrt(config_.init_variance) * init();
                y = x;
                random::NormalStream noise(random::mix(config_.seed ^ kNoiseTag, p));
                double sup = 0.0;
                out.aggregates[0][a] += fac.pre(x);
                sum[a] += x[0];
                sum2[a] += x[0] * x[0];
                auto advance = [&](std::vector<double>& s, double in, double t) {
                    model_.eval_drift(r, t, s, f);
                    model_.eval_diffusion(r, t, s, g);
                    fac.post(s, post);
                    for (std::size_t c = 0; c < d; ++c) {
                        double z = 0.0;
                        for (std::size_t e = 0; e < m; ++e) z += g[c * m + e] * xi[e];
                        nx[c] = s[c] + dt * (f[c] + post[c] * in) + sq * z;
                    }
                    if (model_.project) model_.project(nx);
                    s.swap(nx);
                };
                for (std::size_t n = 0; n < steps_; ++n) {
                    const double t = static_cast<double>(n) * dt;
                    for (std::size_t e = 0; e < m; ++e) xi[e] = noise();
                    advance(x, in_now[n * k + a], t);
                    if (distance) {
                        advance(y, in_prev[n * k + a], t);
                        double d2 = 0.0;
                        for (std::size_t c = 0; c < d; ++c) d2 += (x[c] - y[c]) * (x[c] - y[c]);
                        sup = std::max(sup, d2);
                    }
                    out.aggregates[n + 1][a] += fac.pre(x);
                    if ((n + 1) % config_.record_stride == 0) {
                        const std::size_t fr = (n + 1) / config_.record_stride;
                        sum[fr * k + a] += x[0];
                        sum2[fr * k + a] += x[0] * x[0];
                    }
                }
                sup_acc += sup;
            }
            sup_by_loc[a] = sup_acc;
        }
    }
    const double inv = 1.0 / static_cast<double>(n_per);
    for (auto& row : out.aggregates)
        for (double& v : row) v *= inv;
    out.mean.resize(frames * k);
    out.variance.resize(frames * k);
    for (std::size_t i = 0; i < frames * k; ++i) {
        const double mu = sum[i] * inv;
        out.mean[i] = mu;
        out.variance[i] = n_per > 1 ? (sum2[i] - static_cast<double>(n_per) * mu * mu) / static_cast<double>(n_per - 1) : 0.0;
    }
    if (distance) {
        double total = 0.0;
        for (double s : sup_by_loc) total += s;
        *distance = total / static_cast<double>(k * n_per);
    }
}

const PicardEnsemble& PicardSolver::iterate() {
    const auto t0 = std::chrono::steady_clock::now();
    PicardEnsemble next;
    next.locations = current_.locations;
    next.weights = current_.weights;
    next.particles_per_location = current_.particles_per_location;
    next.iteration = current_.iteration + 1;
    double distance = 0.0;
    run(&current_.aggregates, has_previous_ ? &previous_.aggregates : nullptr, next, &distance);
    previous_ = std::move(current_);
    has_previous_ = true;
    current_ = std::move(next);
    report_.distances.push_back(distance);
    report_.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return current_;
}

} // namespace nf::meanfield
