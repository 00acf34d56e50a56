#include "nftools/run.hpp"

#include <chrono>
#include <deque>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nf/chaos.hpp"
#include "nf/dispersion.hpp"
#include "nf/error.hpp"
#include "nf/io.hpp"
#include "nf/picard.hpp"
#include "nf/random.hpp"

namespace nftools {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kLayoutTag = 0x1a70;

std::vector<double> rest_state(const std::string& model) {
    if (model == "fitzhugh_nagumo") return {0.0, 0.0, 0.0};
    if (model == "hodgkin_huxley") return {-65.0, 0.3177, 0.0529, 0.5961};
    return {0.0};
}

double init_mean(const InitConfig& i, double r) {
    if (i.kind == "clusters") return r < 0.5 ? i.amplitude : -i.amplitude;
    return i.mean;
}

/// In-memory outputs, flushed in insertion order.
struct Outputs {
    std::vector<std::string> names;
    std::deque<std::ostringstream> streams;
    std::ostringstream& add(const std::string& name) {
        names.push_back(name);
        return streams.emplace_back();
    }
};

std::string summary_json(const ordered_json& j) { return j.dump(2) + "\n"; }

nf::network::Engine engine_of(const std::string& s) {
    if (s == "pairwise") return nf::network::Engine::Pairwise;
    if (s == "aggregated") return nf::network::Engine::Aggregated;
    return nf::network::Engine::Auto;
}

void run_simulate(const ExperimentConfig& c, Outputs& out) {
    const auto kernels = make_kernels(c);
    const auto model = make_model(c);
    const auto sizes = nf::network::equal_sizes(c.network.neurons, c.network.populations);
    const auto layout = nf::network::build_layout(c.network.populations, sizes, nf::geometry::SpatialDomain{},
                                                  nf::random::mix(c.seed, kLayoutTag));
    nf::network::SimConfig sc;
    sc.dt = c.numerics.dt;
    sc.t_end = c.numerics.t_end;
    sc.seed = c.seed;
    sc.record_stride = c.numerics.record_stride;
    sc.engine = engine_of(c.network.engine);
    const auto rec = nf::network::simulate(model, layout, kernels, sc, make_init_law(c));
    nf::io::write_trajectory_csv(out.add("trajectory.csv"), rec, layout);
    if (c.network.binary) nf::io::write_trajectory_binary(out.add("trajectory.bin"), rec, c.numerics.record_stride);

    const auto pm = nf::chaos::population_moments(rec, layout);
    auto& pcsv = out.add("populations.csv");
    nf::io::CsvWriter w(pcsv, {"t", "population", "r", "mean", "variance"});
    for (std::size_t k = 0; k < pm.times.size(); ++k)
        for (std::size_t g = 0; g < pm.populations; ++g) {
            w.cell(pm.times[k]).cell(std::uint64_t{g}).cell(layout.locations[g]).cell(pm.mean_at(k, g));
            if (pm.has_variance[g]) w.cell(pm.variance_at(k, g));
            else w.cell(std::string_view{});
            w.end_row();
        }
    ordered_json s;
    s["neurons"] = rec.neurons;
    s["populations"] = layout.population_count();
    s["e_N"] = nf::network::effective_scale(layout);
    s["frames"] = rec.frames();
    out.add("summary.json") << summary_json(s);
}

void run_moments(const ExperimentConfig& c, Outputs& out) {
    if (c.model != "firing_rate") throw nf::InvalidArgument("moment equations exist only for the firing_rate model");
    const auto field = nf::meanfield::solve_moments(make_moment_params(c), make_kernels(c), make_moment_config(c));
    nf::io::write_moments_csv(out.add("moments.csv"), field);
    ordered_json s;
    s["frames"] = field.frames();
    s["grid"] = field.nodes();
    s["final_sup_mean"] = nf::meanfield::final_sup_mean(field);
    s["amplitude_last_quarter"] = nf::meanfield::oscillation_amplitude(field, 0.75 * c.numerics.t_end);
    s["clamped_variance"] = field.clamped_variance;
    out.add("summary.json") << summary_json(s);
}

void run_picard(const ExperimentConfig& c, Outputs& out) {
    nf::meanfield::PicardConfig pc;
    pc.particles_per_location = static_cast<std::size_t>(c.picard.particles / c.picard.locations);
    pc.dt = c.numerics.dt;
    pc.t_end = c.numerics.t_end;
    pc.seed = c.seed;
    pc.record_stride = c.numerics.record_stride;
    pc.init_mean = c.init.mean;
    pc.init_variance = c.init.kind == "gaussian" ? c.init.variance : 0.0;
    std::vector<double> locs;
    for (std::uint64_t a = 0; a < c.picard.locations; ++a)
        locs.push_back((static_cast<double>(a) + 0.5) / static_cast<double>(c.picard.locations));
    nf::meanfield::PicardSolver solver(make_model(c), make_kernels(c), locs, pc);
    for (std::uint64_t k = 0; k < c.picard.iterations; ++k) solver.iterate();
    nf::io::write_picard_csv(out.add("picard.csv"), solver.report());
    const auto& d = solver.report().distances;
    ordered_json s;
    s["particles"] = solver.ensemble().particle_count();
    s["iterations"] = d.size();
    s["ratio_last_first"] = d.front() > 0.0 ? d.back() / d.front() : 0.0;
    bool dec = true;
    for (std::size_t k = 1; k < d.size(); ++k) dec = dec && d[k] < d[k - 1];
    s["strictly_decreasing"] = dec;
    out.add("summary.json") << summary_json(s);
}

nf::bifurcation::DispersionParams dispersion_params(const ExperimentConfig& c, double tau_s) {
    nf::bifurcation::DispersionParams p;
    p.j_bar = c.geometry.j_bar;
    p.g = c.neuron.gain;
    p.delta = c.geometry.delta;
    p.c = c.geometry.c;
    p.sigma = c.neuron.sigma;
    p.tau_s = tau_s;
    p.form = c.dispersion.symbol == "printed" ? nf::bifurcation::SymbolForm::Printed
                                              : nf::bifurcation::SymbolForm::Circle;
    return p;
}

void run_dispersion(const ExperimentConfig& c, Outputs& out) {
    auto taus = c.dispersion.tau_s_values;
    if (taus.empty()) taus.push_back(c.geometry.tau_s);
    const nf::bifurcation::SearchBox box{c.dispersion.re_min, c.dispersion.re_max, c.dispersion.im_min,
                                          c.dispersion.im_max};
    ordered_json s;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const auto p = dispersion_params(c, taus[i]);
        const auto k0 = static_cast<int>(c.dispersion.k_min), k1 = static_cast<int>(c.dispersion.k_max);
        const auto roots = nf::bifurcation::find_roots(p, box, k0, k1);
        const auto cls = nf::bifurcation::classify(p, k0, k1, box);
        const std::string tag = std::to_string(i);
        nf::io::write_roots_csv(out.add("roots_" + tag + ".csv"), roots);
        s["tau_s_" + tag] = taus[i];
        s["regime_" + tag] = nf::bifurcation::to_string(cls.regime);
        s["rightmost_re_" + tag] = cls.rightmost ? cls.rightmost->xi.real() : std::nan("");
        s["rightmost_im_" + tag] = cls.rightmost ? cls.rightmost->xi.imag() : std::nan("");
        s["unresolved_" + tag] = roots.unresolved.size();
    }
    out.add("summary.json") << summary_json(s);
}

void run_hopf(const ExperimentConfig& c, Outputs& out) {
    std::vector<double> omegas;
    const auto n = c.hopf.omega_count;
    for (std::uint64_t i = 0; i < n; ++i)
        omegas.push_back(n == 1 ? c.hopf.omega_min
                                : c.hopf.omega_min + (c.hopf.omega_max - c.hopf.omega_min) * static_cast<double>(i) /
                                                         static_cast<double>(n - 1));
    const auto base = dispersion_params(c, c.geometry.tau_s);
    std::vector<nf::bifurcation::HopfCurve> curves;
    std::size_t samples = 0;
    for (auto k = c.hopf.k_min; k <= c.hopf.k_max; ++k)
        for (auto m = c.hopf.m_min; m <= c.hopf.m_max; ++m) {
            curves.push_back(nf::bifurcation::hopf_curve(static_cast<int>(k), static_cast<int>(m), omegas, base));
            samples += curves.back().samples.size();
        }
    nf::io::write_curve_csv(out.add("curve.csv"), curves);
    ordered_json s;
    s["curves"] = curves.size();
    s["samples"] = samples;
    out.add("summary.json") << summary_json(s);
}

void run_scan(const ExperimentConfig& c, Outputs& out) {
    if (c.model != "firing_rate") throw nf::InvalidArgument("chaos-scan compares against the firing_rate moment equations");
    const auto kernels = make_kernels(c);
    auto mc = make_moment_config(c);
    mc.dt = c.scan.moment_dt;
    mc.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(c.numerics.dt / mc.dt)));
    const auto reference = nf::meanfield::solve_moments(make_moment_params(c), kernels, mc);
    std::vector<std::size_t> ns(c.scan.neurons.begin(), c.scan.neurons.end());
    const auto schedule =
        c.scan.populations == 0
            ? nf::chaos::sqrt_schedule(ns, c.scan.layout_replicas, c.scan.noise_replicas, c.seed)
            : nf::chaos::fixed_schedule(ns, c.scan.populations, c.scan.layout_replicas, c.scan.noise_replicas, c.seed);
    nf::chaos::ScanSimulation sim;
    sim.dt = c.numerics.dt;
    sim.t_end = c.numerics.t_end;
    sim.record_stride = c.numerics.record_stride;
    sim.init = make_init_law(c);
    const auto report = nf::chaos::convergence_scan(schedule, make_model(c), kernels, reference, sim);
    nf::io::write_scan_csv(out.add("scan.csv"), report);
    ordered_json s;
    s["points"] = report.rows.size();
    s["fitted"] = report.fitted;
    if (report.fitted) {
        s["slope"] = report.slope;
        s["slope_stderr"] = report.slope_stderr;
        s["intercept"] = report.intercept;
    }
    out.add("summary.json") << summary_json(s);
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    f << bytes;
    if (!f) throw nf::Error("io", "cannot write " + path.string());
}

} // namespace

nf::geometry::Kernels make_kernels(const ExperimentConfig& c) {
    return {nf::geometry::ConnectivityKernel(c.geometry.j_bar, c.geometry.delta),
            nf::geometry::DelayKernel(c.geometry.c, c.geometry.tau_s)};
}

nf::models::ModelSpec make_model(const ExperimentConfig& c) {
    const nf::geometry::ConnectivityKernel k(c.geometry.j_bar, c.geometry.delta);
    const auto& n = c.neuron;
    const double input = n.input;
    if (c.model == "fitzhugh_nagumo") {
        nf::models::FitzHughNagumoParams p;
        p.a = n.fn_a;
        p.b = n.fn_b;
        p.input = input;
        p.sigma_v = n.sigma;
        p.sigma_w = n.sigma_w;
        p.synapse.v_rev = n.v_rev;
        return nf::models::make_fitzhugh_nagumo(p, k);
    }
    if (c.model == "hodgkin_huxley") {
        nf::models::HodgkinHuxleyParams p;
        p.input = input;
        p.sigma_ext = n.sigma;
        p.channel_count = n.channel_count;
        p.v_rev = n.v_rev;
        return nf::models::make_hodgkin_huxley(p, k);
    }
    nf::models::FiringRateParams p;
    p.theta = n.theta;
    p.gain = n.gain;
    p.sigma = n.sigma;
    if (input != 0.0) p.input = [input](double, double) { return input; };
    return nf::models::make_firing_rate(p, k);
}

nf::network::InitLaw make_init_law(const ExperimentConfig& c) {
    const auto rest = rest_state(c.model);
    const InitConfig init = c.init;
    auto mean = [rest, init](double r, std::size_t comp) {
        return rest[comp] + (comp == 0 ? init_mean(init, r) : 0.0);
    };
    if (init.kind == "constant") {
        std::vector<double> v = rest;
        v[0] += init.mean;
        return nf::network::InitLaw::constant(v);
    }
    std::vector<double> var(rest.size(), 0.0);
    var[0] = init.kind == "gaussian" ? init.variance : 0.0;
    if (init.kind == "clusters" && init.variance > 0.0) var[0] = init.variance;
    return nf::network::InitLaw::gaussian(mean, var);
}

nf::meanfield::MomentParams make_moment_params(const ExperimentConfig& c) {
    nf::meanfield::MomentParams p;
    p.theta = c.neuron.theta;
    p.gain = c.neuron.gain;
    p.sigma = c.neuron.sigma;
    const double input = c.neuron.input;
    if (input != 0.0) p.input = [input](double, double) { return input; };
    return p;
}

nf::meanfield::MomentConfig make_moment_config(const ExperimentConfig& c) {
    nf::meanfield::MomentConfig mc;
    mc.grid_size = static_cast<std::size_t>(c.numerics.grid);
    mc.dt = c.numerics.dt;
    mc.t_end = c.numerics.t_end;
    mc.record_stride = static_cast<std::size_t>(c.numerics.record_stride);
    const InitConfig init = c.init;
    mc.initial_mean = [init](double r, double) { return init_mean(init, r); };
    const double v0 = init.kind == "constant" ? 0.0 : init.variance;
    mc.initial_variance = [v0](double, double) { return v0; };
    return mc;
}

RunResult run(const ExperimentConfig& config, const RunOptions& options, std::ostream& err) {
    RunResult result;
    ExperimentConfig c = config;
    if (options.seed) c.seed = *options.seed;
    const auto started = std::chrono::steady_clock::now();
    try {
        validate(c);
        Outputs out;
        static const std::map<std::string, std::function<void(const ExperimentConfig&, Outputs&)>> pipelines = {
            {"simulate", run_simulate},     {"moments", run_moments},   {"picard", run_picard},
            {"dispersion", run_dispersion}, {"hopf-curve", run_hopf},   {"chaos-scan", run_scan},
        };
        pipelines.at(c.experiment)(c, out);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        std::filesystem::create_directories(options.out_dir);
        for (std::size_t k = 0; k < out.names.size(); ++k) {
            write_file(options.out_dir / out.names[k], out.streams[k].str());
            result.outputs.push_back(out.names[k]);
        }
        const std::string canonical = serialize_config(c);
        ordered_json m;
        m["config_hash"] = nf::io::hex64(nf::io::fnv1a(canonical));
        m["version"] = kVersion;
        m["experiment"] = c.experiment;
        m["seed"] = c.seed;
        m["wall_time_s"] = wall;
        m["outputs"] = result.outputs;
        m["config"] = ordered_json::parse(canonical);
        write_file(options.out_dir / "manifest.json", m.dump(2) + "\n");
        result.outputs.push_back("manifest.json");
    } catch (const ConfigError& e) {
        ordered_json rec{{"error", "config"}, {"key", e.key()}, {"constraint", e.constraint()}, {"message", e.what()}};
        err << rec.dump() << "\n";
        result.status = 2;
    } catch (const nf::Error& e) {
        ordered_json rec{{"error", e.kind()}, {"message", e.what()}};
        err << rec.dump() << "\n";
        result.status = 1;
    } catch (const std::exception& e) {
        ordered_json rec{{"error", "internal"}, {"message", e.what()}};
        err << rec.dump() << "\n";
        result.status = 1;
    }
    return result;
}

} // namespace nftools
