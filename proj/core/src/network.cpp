#include "nf/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <limits>
#include <numeric>
#include <string>

#include "nf/error.hpp"
#include "nf/parallel.hpp"
#include "nf/random.hpp"

namespace nf::network {

namespace {

PopulationLayout assemble(const std::vector<std::size_t>& sizes, std::vector<double> locations) {
    if (sizes.empty()) throw InvalidArgument("layout needs at least one population");
    if (locations.size() != sizes.size())
        throw InvalidArgument("layout needs one location per population");
    PopulationLayout layout;
    layout.sizes = sizes;
    layout.locations = std::move(locations);
    layout.offsets.reserve(sizes.size());
    std::size_t next = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        if (sizes[g] == 0)
            throw InvalidArgument("population " + std::to_string(g) + " is empty");
        layout.offsets.push_back(next);
        next += sizes[g];
        layout.neuron_population.insert(layout.neuron_population.end(), sizes[g], g);
    }
    return layout;
}

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;

} // namespace

PopulationLayout build_layout(std::size_t population_count, const std::vector<std::size_t>& sizes,
                              const geometry::SpatialDomain& domain, std::uint64_t seed) {
    if (sizes.size() != population_count)
        throw InvalidArgument("sizes must list one entry per population");
    return assemble(sizes, geometry::sample_locations(domain, population_count, seed));
}

PopulationLayout layout_with_locations(const std::vector<std::size_t>& sizes,
                                       const std::vector<double>& locations) {
    std::vector<double> wrapped(locations.size());
    std::transform(locations.begin(), locations.end(), wrapped.begin(), geometry::wrap);
    return assemble(sizes, std::move(wrapped));
}

std::vector<std::size_t> equal_sizes(std::size_t neurons, std::size_t populations) {
    if (populations == 0 || neurons < populations)
        throw InvalidArgument("equal_sizes needs 1 <= P <= N");
    std::vector<std::size_t> sizes(populations, neurons / populations);
    for (std::size_t g = 0; g < neurons % populations; ++g) ++sizes[g];
    return sizes;
}

double effective_scale(const PopulationLayout& layout) {
    double acc = 0.0;
    for (std::size_t n : layout.sizes) acc += 1.0 / static_cast<double>(n);
    return acc / static_cast<double>(layout.sizes.size());
}

InitLaw InitLaw::constant(std::vector<double> value) {
    InitLaw law;
    law.kind = Kind::Constant;
    law.value = std::move(value);
    return law;
}

InitLaw InitLaw::gaussian(std::function<double(double, std::size_t)> mean,
                          std::vector<double> variance) {
    InitLaw law;
    law.kind = Kind::Gaussian;
    law.mean = std::move(mean);
    law.variance = std::move(variance);
    return law;
}

InitLaw InitLaw::gaussian(std::vector<double> mean, std::vector<double> variance) {
    return gaussian([mean](double, std::size_t c) { return mean[c]; }, std::move(variance));
}

InitLaw InitLaw::from_path(std::function<double(double, std::size_t, double)> path) {
    InitLaw law;
    law.kind = Kind::Path;
    law.path = std::move(path);
    return law;
}

double InitialState::value(std::size_t neuron, std::size_t comp, double t) const {
    if (path) return path(neuron, comp, t);
    return constants[neuron * dim + comp];
}

InitialState sample_initial(const PopulationLayout& layout, std::size_t dim, const InitLaw& law,
                            std::uint64_t seed) {
    InitialState init;
    init.dim = dim;
    const std::size_t n = layout.total();
    switch (law.kind) {
    case InitLaw::Kind::Constant:
        if (law.value.size() != dim) throw InvalidArgument("constant initial law has wrong dimension");
        init.constants.resize(n * dim);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(law.value.begin(), law.value.end(), init.constants.begin() + i * dim);
        break;
    case InitLaw::Kind::Gaussian:
        if (law.variance.size() != dim || !law.mean)
            throw InvalidArgument("Gaussian initial law has wrong dimension");
        init.constants.resize(n * dim);
        for (std::size_t i = 0; i < n; ++i) {
            random::NormalStream z(random::mix(seed, i));
            const double r = layout.locations[layout.neuron_population[i]];
            for (std::size_t c = 0; c < dim; ++c)
                init.constants[i * dim + c] = law.mean(r, c) + std::sqrt(law.variance[c]) * z();
        }
        break;
    case InitLaw::Kind::Path: {
        if (!law.path) throw InvalidArgument("path initial law has no path");
        std::vector<double> locs(n);
        for (std::size_t i = 0; i < n; ++i) locs[i] = layout.locations[layout.neuron_population[i]];
        init.path = [locs = std::move(locs), path = law.path](std::size_t i, std::size_t c, double t) {
            return path(locs[i], c, t);
        };
        break;
    }
    }
    return init;
}

HistoryBuffer init_chaotic(const PopulationLayout& layout, std::size_t dim, const InitLaw& law,
                           std::uint64_t seed, double dt, double horizon) {
    auto init = std::make_shared<InitialState>(sample_initial(layout, dim, law, seed));
    return HistoryBuffer(layout.total() * dim, dt, horizon,
                         [init, dim](std::size_t ch, double t) { return init->value(ch / dim, ch % dim, t); });
}

double delayed_lookup(const HistoryBuffer& buffer, std::size_t dim, std::size_t neuron,
                      std::size_t comp, double t) {
    return buffer.lookup(neuron * dim + comp, t);
}

std::uint64_t neuron_seed(std::uint64_t master, std::size_t neuron) {
    return random::mix(master ^ kNoiseTag, neuron);
}

namespace {

struct Scratch {
    std::vector<double> f, g, b, y, acc, post;
    explicit Scratch(std::size_t d, std::size_t m) : f(d), g(d * m), b(d), y(d), acc(d), post(d) {}
};

// x <- x + dt * (f + interaction) + sqrt(dt) * G xi, then projection.
void euler_update(const models::ModelSpec& model, double r, double t, double dt,
                  std::span<const double> x, std::span<const double> interaction,
                  std::span<const double> xi, std::span<double> out, Scratch& s) {
    const std::size_t d = model.dim, m = model.noise_dim;
    model.eval_drift(r, t, x, s.f);
    model.eval_diffusion(r, t, x, s.g);
    const double sq = std::sqrt(dt);
    for (std::size_t a = 0; a < d; ++a) {
        double noise = 0.0;
        for (std::size_t k = 0; k < m; ++k) noise += s.g[a * m + k] * xi[k];
        out[a] = x[a] + dt * (s.f[a] + interaction[a]) + sq * noise;
    }
    if (model.project) model.project(out);
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

[[noreturn]] void report_blow_up(double t, std::size_t neuron) {
    throw BlowUp("non-finite state for neuron " + std::to_string(neuron) + " at t=" + std::to_string(t),
                 t, neuron);
}

} // namespace

std::vector<double> step(const models::ModelSpec& model, const PopulationLayout& layout,
                         const geometry::Kernels& kernels, const HistoryBuffer& buffer, double t,
                         double dt, std::span<const double> noise) {
    const std::size_t n = layout.total(), d = model.dim, m = model.noise_dim;
    const std::size_t pops = layout.population_count();
    if (buffer.width() != n * d) throw InvalidArgument("history width does not match the network");
    if (noise.size() != n * m) throw InvalidArgument("noise vector must hold N * noise_dim normals");
    if (!model.interaction) throw InvalidArgument("model has no interaction function");
    const auto current = buffer.current();
    std::vector<double> next(n * d);
    std::atomic<std::size_t> bad{std::numeric_limits<std::size_t>::max()};

#pragma omp parallel num_threads(parallel::thread_count())
    {
        Scratch s(d, m);
        std::vector<double> total(d);
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t alpha = layout.neuron_population[i];
            const double r = layout.locations[alpha];
            const std::span<const double> x = current.subspan(i * d, d);
            std::fill(total.begin(), total.end(), 0.0);
            for (std::size_t g = 0; g < pops; ++g) {
                const double r2 = layout.locations[g];
                const double t_del = t - kernels.delay(r, r2);
                std::fill(s.acc.begin(), s.acc.end(), 0.0);
                for (std::size_t j = layout.offsets[g]; j < layout.offsets[g] + layout.sizes[g]; ++j) {
                    for (std::size_t c = 0; c < d; ++c) s.y[c] = buffer.lookup(j * d + c, t_del);
                    model.interaction(r, r2, x, s.y, s.b);
                    for (std::size_t c = 0; c < d; ++c) s.acc[c] += s.b[c];
                }
                for (std::size_t c = 0; c < d; ++c)
                    total[c] += s.acc[c] / static_cast<double>(layout.sizes[g]);
            }
            for (double& v : total) v /= static_cast<double>(pops);
            const std::span<double> out(next.data() + i * d, d);
            euler_update(model, r, t, dt, x, total, noise.subspan(i * m, m), out, s);
            if (!all_finite(out)) {
                std::size_t expected = std::numeric_limits<std::size_t>::max();
                bad.compare_exchange_strong(expected, i);
            }
        }
    }
    if (bad != std::numeric_limits<std::size_t>::max()) report_blow_up(t + dt, bad);
    return next;
}

namespace {

void check_config(const models::ModelSpec& model, const geometry::Kernels& kernels,
                  const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InvalidArgument("dt must be > 0");
    if (!(cfg.t_end >= 0.0)) throw InvalidArgument("t_end must be >= 0");
    if (cfg.record_stride == 0) throw InvalidArgument("record_stride must be >= 1");
    if (kernels.delay.tau_s > 0.0 && cfg.dt > kernels.delay.tau_s * (1.0 + 1e-12))
        throw InvalidArgument("dt must not exceed tau_s so delays are resolvable");
    if (!model.drift || !model.diffusion) throw InvalidArgument("model is incomplete");
}

std::size_t step_count(const SimConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
}

void record_frame(TrajectoryRecord& rec, double t, std::span<const double> states) {
    rec.times.push_back(t);
    rec.states.insert(rec.states.end(), states.begin(), states.end());
}

TrajectoryRecord run_pairwise(const models::ModelSpec& model, const PopulationLayout& layout,
                              const geometry::Kernels& kernels, const SimConfig& cfg,
                              const InitLaw& init) {
    const std::size_t n = layout.total(), d = model.dim, m = model.noise_dim;
    HistoryBuffer buffer = init_chaotic(layout, d, init, random::mix(cfg.seed, cfg.init_stream),
                                        cfg.dt, kernels.delay.tau_max());
    std::vector<random::NormalStream> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) streams.emplace_back(neuron_seed(cfg.seed, i));

    TrajectoryRecord rec{n, d, {}, {}};
    record_frame(rec, 0.0, buffer.current());
    std::vector<double> noise(n * m);
    const std::size_t steps = step_count(cfg);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < m; ++c) noise[i * m + c] = streams[i]();
        auto next = step(model, layout, kernels, buffer, t, cfg.dt, noise);
        buffer.commit(next);
        if ((k + 1) % cfg.record_stride == 0) record_frame(rec, static_cast<double>(k + 1) * cfg.dt, next);
    }
    return rec;
}

TrajectoryRecord run_aggregated(const models::ModelSpec& model, const PopulationLayout& layout,
                                const geometry::Kernels& kernels, const SimConfig& cfg,
                                const InitLaw& law) {
    const models::Factorization& fac = *model.factorized;
    const std::size_t n = layout.total(), d = model.dim, m = model.noise_dim;
    const std::size_t pops = layout.population_count();
    const double horizon = kernels.delay.tau_max();
    const InitialState init = sample_initial(layout, d, law, random::mix(cfg.seed, cfg.init_stream));

    std::vector<double> states(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) states[i * d + c] = init.value(i, c, 0.0);

    // Population averages of pre(y) over the initial segment, sampled on the
    // step grid t = -k dt and interpolated in between.
    const std::size_t init_rows = init.path ? static_cast<std::size_t>(std::ceil(horizon / cfg.dt)) + 1 : 1;
    std::vector<double> init_table(init_rows * pops, 0.0);
    {
        std::vector<double> y(d);
        for (std::size_t k = 0; k < init_rows; ++k) {
            const double t = -static_cast<double>(k) * cfg.dt;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t c = 0; c < d; ++c) y[c] = init.value(i, c, t);
                init_table[k * pops + layout.neuron_population[i]] += fac.pre(y);
            }
            for (std::size_t g = 0; g < pops; ++g)
                init_table[k * pops + g] /= static_cast<double>(layout.sizes[g]);
        }
    }
    auto initial = [&init_table, init_rows, pops, dt = cfg.dt](std::size_t g, double t) {
        if (init_rows == 1) return init_table[g];
        const double x = std::min(-t / dt, static_cast<double>(init_rows - 1));
        const auto k = std::min(static_cast<std::size_t>(x), init_rows - 2);
        const double w = x - static_cast<double>(k);
        return (1.0 - w) * init_table[k * pops + g] + w * init_table[(k + 1) * pops + g];
    };
    HistoryBuffer agg(pops, cfg.dt, horizon, initial);

    std::vector<double> coupling(pops * pops), delay(pops * pops);
    for (std::size_t a = 0; a < pops; ++a)
        for (std::size_t g = 0; g < pops; ++g) {
            coupling[a * pops + g] = fac.connectivity(layout.locations[a], layout.locations[g]) /
                                     static_cast<double>(pops);
            delay[a * pops + g] = kernels.delay(layout.locations[a], layout.locations[g]);
        }

    std::vector<random::NormalStream> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) streams.emplace_back(neuron_seed(cfg.seed, i));

    TrajectoryRecord rec{n, d, {}, {}};
    record_frame(rec, 0.0, states);

    std::vector<double> next(n * d), pre(n), input(pops), agg_row(pops);
    const std::size_t steps = step_count(cfg);
    const int threads = parallel::thread_count();
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        for (std::size_t a = 0; a < pops; ++a) {
            double acc = 0.0;
            for (std::size_t g = 0; g < pops; ++g)
                acc += coupling[a * pops + g] * agg.lookup(g, t - delay[a * pops + g]);
            input[a] = acc;
        }
        std::atomic<std::size_t> bad{std::numeric_limits<std::size_t>::max()};
#pragma omp parallel num_threads(threads)
        {
            Scratch s(d, m);
            std::vector<double> xi(m);
#pragma omp for schedule(static)
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t alpha = layout.neuron_population[i];
                const std::span<const double> x(states.data() + i * d, d);
                fac.post(x, s.post);
                for (std::size_t c = 0; c < d; ++c) s.post[c] *= input[alpha];
                for (std::size_t c = 0; c < m; ++c) xi[c] = streams[i]();
                const std::span<double> out(next.data() + i * d, d);
                euler_update(model, layout.locations[alpha], t, cfg.dt, x, s.post, xi, out, s);
                if (!all_finite(out)) {
                    std::size_t expected = std::numeric_limits<std::size_t>::max();
                    bad.compare_exchange_strong(expected, i);
                }
                pre[i] = fac.pre(out);
            }
        }
        if (bad != std::numeric_limits<std::size_t>::max()) report_blow_up(t + cfg.dt, bad);
        // fixed summation order keeps the aggregate independent of threading
        for (std::size_t g = 0; g < pops; ++g) {
            double acc = 0.0;
            for (std::size_t i = layout.offsets[g]; i < layout.offsets[g] + layout.sizes[g]; ++i) acc += pre[i];
            agg_row[g] = acc / static_cast<double>(layout.sizes[g]);
        }
        agg.commit(agg_row);
        states.swap(next);
        if ((k + 1) % cfg.record_stride == 0) record_frame(rec, static_cast<double>(k + 1) * cfg.dt, states);
    }
    return rec;
}

} // namespace

TrajectoryRecord simulate(const models::ModelSpec& model, const PopulationLayout& layout,
                          const geometry::Kernels& kernels, const SimConfig& config,
                          const InitLaw& init) {
    check_config(model, kernels, config);
    const bool aggregated = config.engine == Engine::Aggregated ||
                            (config.engine == Engine::Auto && model.factorized.has_value());
    if (aggregated) {
        if (!model.factorized) throw InvalidArgument("aggregated engine needs a factorized interaction");
        return run_aggregated(model, layout, kernels, config, init);
    }
    return run_pairwise(model, layout, kernels, config, init);
}

} // namespace nf::network
