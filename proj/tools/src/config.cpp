#include "nftools/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "json.hpp"

namespace nftools {

using nlohmann::ordered_json;

std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t best_d = std::string::npos;
    for (const auto& c : candidates) {
        std::vector<std::size_t> row(c.size() + 1);
        for (std::size_t j = 0; j <= c.size(); ++j) row[j] = j;
        for (std::size_t i = 1; i <= key.size(); ++i) {
            std::size_t diag = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= c.size(); ++j) {
                const std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (key[i - 1] == c[j - 1] ? 0u : 1u)});
                diag = up;
            }
        }
        if (row[c.size()] < best_d) {
            best_d = row[c.size()];
            best = c;
        }
    }
    if (best_d > std::max<std::size_t>(2, key.size() / 2)) return {};
    return best;
}

namespace {

/// Binds JSON keys of one table to struct fields, in declaration order.
class Table {
public:
    explicit Table(std::string prefix) : prefix_(std::move(prefix)) {}

    template <class T>
    Table& field(const std::string& name, T& ref) {
        names_.push_back(name);
        readers_.push_back([this, name, &ref](const ordered_json& j) {
            try {
                ref = j.get<T>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(full(name), "type", "key '" + full(name) + "' has the wrong type");
            }
        });
        writers_.push_back([name, &ref](ordered_json& j) { j[name] = ref; });
        return *this;
    }

    void read(const ordered_json& j) const {
        if (!j.is_object()) throw ConfigError(prefix_, "table", "'" + prefix_ + "' must be a table");
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto pos = std::find(names_.begin(), names_.end(), it.key());
            if (pos == names_.end()) {
                std::string msg = "unknown key '" + full(it.key()) + "'";
                const auto near = nearest_key(it.key(), names_);
                if (!near.empty()) msg += "; did you mean '" + full(near) + "'?";
                throw ConfigError(full(it.key()), "unknown", msg);
            }
            readers_[static_cast<std::size_t>(pos - names_.begin())](it.value());
        }
    }

    ordered_json write() const {
        ordered_json j = ordered_json::object();
        for (const auto& w : writers_) w(j);
        return j;
    }

    const std::vector<std::string>& names() const { return names_; }

private:
    std::string full(const std::string& k) const { return prefix_.empty() ? k : prefix_ + "." + k; }

    std::string prefix_;
    std::vector<std::string> names_;
    std::vector<std::function<void(const ordered_json&)>> readers_;
    std::vector<std::function<void(ordered_json&)>> writers_;
};

struct Binding {
    Table geometry{"geometry"}, neuron{"neuron"}, numerics{"numerics"}, network{"network"}, init{"init"},
        dispersion{"dispersion"}, hopf{"hopf"}, picard{"picard"}, scan{"scan"};
    std::vector<std::pair<std::string, Table*>> tables;

    explicit Binding(ExperimentConfig& c) {
        auto& g = c.geometry;
        geometry.field("j_bar", g.j_bar).field("delta", g.delta).field("c", g.c).field("tau_s", g.tau_s);
        auto& n = c.neuron;
        neuron.field("theta", n.theta).field("gain", n.gain).field("sigma", n.sigma).field("input", n.input)
            .field("fn_a", n.fn_a).field("fn_b", n.fn_b).field("sigma_w", n.sigma_w).field("v_rev", n.v_rev)
            .field("channel_count", n.channel_count);
        auto& nu = c.numerics;
        numerics.field("dt", nu.dt).field("t_end", nu.t_end).field("grid", nu.grid)
            .field("record_stride", nu.record_stride);
        auto& w = c.network;
        network.field("neurons", w.neurons).field("populations", w.populations).field("engine", w.engine)
            .field("binary", w.binary);
        auto& i = c.init;
        init.field("kind", i.kind).field("mean", i.mean).field("variance", i.variance).field("amplitude", i.amplitude);
        auto& d = c.dispersion;
        dispersion.field("tau_s_values", d.tau_s_values).field("k_min", d.k_min).field("k_max", d.k_max)
            .field("re_min", d.re_min).field("re_max", d.re_max).field("im_min", d.im_min).field("im_max", d.im_max)
            .field("symbol", d.symbol);
        auto& h = c.hopf;
        hopf.field("k_min", h.k_min).field("k_max", h.k_max).field("m_min", h.m_min).field("m_max", h.m_max)
            .field("omega_min", h.omega_min).field("omega_max", h.omega_max).field("omega_count", h.omega_count);
        auto& p = c.picard;
        picard.field("particles", p.particles).field("locations", p.locations).field("iterations", p.iterations);
        auto& s = c.scan;
        scan.field("neurons", s.neurons).field("populations", s.populations)
            .field("layout_replicas", s.layout_replicas).field("noise_replicas", s.noise_replicas)
            .field("moment_dt", s.moment_dt);
        tables = {{"geometry", &geometry}, {"neuron", &neuron},       {"numerics", &numerics},
                  {"network", &network},   {"init", &init},           {"dispersion", &dispersion},
                  {"hopf", &hopf},         {"picard", &picard},       {"scan", &scan}};
    }
};

const std::vector<std::string> kTopLevel = {"experiment", "model", "seed", "geometry", "neuron", "numerics",
                                            "network", "init", "dispersion", "hopf", "picard", "scan"};
const std::vector<std::string> kExperiments = {"simulate", "moments", "picard", "dispersion", "hopf-curve",
                                               "chaos-scan"};

void require(bool ok, const std::string& key, const std::string& constraint) {
    if (!ok) throw ConfigError(key, constraint, "key '" + key + "' violates " + constraint);
}

void one_of(const std::string& value, const std::vector<std::string>& allowed, const std::string& key) {
    if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
    std::string msg = "key '" + key + "' must be one of " + list;
    const auto near = nearest_key(value, allowed);
    if (!near.empty()) msg += "; did you mean '" + near + "'?";
    throw ConfigError(key, "one of " + list, msg);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void validate(const ExperimentConfig& c) {
    one_of(c.experiment, kExperiments, "experiment");
    one_of(c.model, {"firing_rate", "fitzhugh_nagumo", "hodgkin_huxley"}, "model");
    const auto& g = c.geometry;
    require(finite(g.j_bar), "geometry.j_bar", "j_bar finite");
    require(g.delta > 0.0 && finite(g.delta), "geometry.delta", "delta > 0");
    require(g.c > 0.0 && finite(g.c), "geometry.c", "c > 0");
    require(g.tau_s >= 0.0 && finite(g.tau_s), "geometry.tau_s", "tau_s >= 0");
    const auto& n = c.neuron;
    require(n.theta > 0.0, "neuron.theta", "theta > 0");
    require(n.gain > 0.0, "neuron.gain", "gain > 0");
    require(n.sigma >= 0.0, "neuron.sigma", "sigma >= 0");
    require(n.sigma_w >= 0.0, "neuron.sigma_w", "sigma_w >= 0");
    require(n.channel_count >= 1.0, "neuron.channel_count", "channel_count >= 1");
    const auto& nu = c.numerics;
    require(nu.dt > 0.0 && finite(nu.dt), "numerics.dt", "dt > 0");
    require(nu.t_end >= 0.0 && finite(nu.t_end), "numerics.t_end", "t_end >= 0");
    require(nu.grid >= 1, "numerics.grid", "grid >= 1");
    require(nu.record_stride >= 1, "numerics.record_stride", "record_stride >= 1");
    const auto& w = c.network;
    require(w.populations >= 1, "network.populations", "populations >= 1");
    require(w.neurons >= w.populations, "network.neurons", "neurons >= populations");
    one_of(w.engine, {"auto", "pairwise", "aggregated"}, "network.engine");
    const auto& i = c.init;
    one_of(i.kind, {"constant", "gaussian", "clusters"}, "init.kind");
    require(i.variance >= 0.0, "init.variance", "variance >= 0");
    const auto& d = c.dispersion;
    for (double t : d.tau_s_values) require(t >= 0.0, "dispersion.tau_s_values", "tau_s >= 0");
    require(d.k_min <= d.k_max, "dispersion.k_max", "k_min <= k_max");
    require(d.re_min < d.re_max, "dispersion.re_max", "re_min < re_max");
    require(d.im_min < d.im_max, "dispersion.im_max", "im_min < im_max");
    one_of(d.symbol, {"circle", "printed"}, "dispersion.symbol");
    const auto& h = c.hopf;
    require(h.k_min <= h.k_max, "hopf.k_max", "k_min <= k_max");
    require(h.m_min <= h.m_max, "hopf.m_max", "m_min <= m_max");
    require(h.omega_min > 0.0, "hopf.omega_min", "omega_min > 0");
    require(h.omega_max > h.omega_min, "hopf.omega_max", "omega_max > omega_min");
    require(h.omega_count >= 1, "hopf.omega_count", "omega_count >= 1");
    const auto& p = c.picard;
    require(p.locations >= 1, "picard.locations", "locations >= 1");
    require(p.particles >= 2 * p.locations, "picard.particles", "particles >= 2 per location");
    require(p.iterations >= 1, "picard.iterations", "iterations >= 1");
    const auto& s = c.scan;
    require(!s.neurons.empty(), "scan.neurons", "at least one point");
    for (auto N : s.neurons) require(N >= 1 && N >= s.populations, "scan.neurons", "N >= max(1, populations)");
    require(s.layout_replicas >= 1, "scan.layout_replicas", "layout_replicas >= 1");
    require(s.noise_replicas >= 1, "scan.noise_replicas", "noise_replicas >= 1");
    require(s.moment_dt > 0.0, "scan.moment_dt", "moment_dt > 0");
}

ExperimentConfig parse_config(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", "syntax", std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "table", "config must be a JSON object");
    ExperimentConfig c;
    Binding b(c);
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& key = it.key();
        if (std::find(kTopLevel.begin(), kTopLevel.end(), key) == kTopLevel.end()) {
            // suggest among top-level keys and every table key
            std::vector<std::string> all = kTopLevel;
            for (const auto& [name, t] : b.tables)
                for (const auto& f : t->names()) all.push_back(name + "." + f);
            std::string msg = "unknown key '" + key + "'";
            auto near = nearest_key(key, all);
            if (near.empty()) {
                std::vector<std::string> leaves;
                for (const auto& a : all) leaves.push_back(a.substr(a.find('.') + 1));
                near = nearest_key(key, leaves);
                if (!near.empty()) near = all[static_cast<std::size_t>(std::find(leaves.begin(), leaves.end(), near) - leaves.begin())];
            }
            if (!near.empty()) msg += "; did you mean '" + near + "'?";
            throw ConfigError(key, "unknown", msg);
        }
    }
    if (!j.contains("experiment")) throw ConfigError("experiment", "required", "missing required key 'experiment'");
    try {
        c.experiment = j.at("experiment").get<std::string>();
        if (j.contains("model")) c.model = j.at("model").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("experiment", "type", "top-level keys experiment/model must be strings, seed an unsigned integer");
    }
    for (const auto& [name, t] : b.tables)
        if (j.contains(name)) t->read(j.at(name));
    validate(c);
    return c;
}

std::string serialize_config(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    Binding b(c);
    ordered_json j;
    j["experiment"] = c.experiment;
    j["model"] = c.model;
    j["seed"] = c.seed;
    for (const auto& [name, t] : b.tables) j[name] = t->write();
    return j.dump(2) + "\n";
}

} // namespace nftools
