#include "nf/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nf/error.hpp"

namespace nf::models {

double sigmoid(double g, double x) { return 0.5 * std::erf(g * x / std::numbers::sqrt2); }

double chi(double x) { return std::clamp(4.0 * x * (1.0 - x), 0.0, 1.0); }

namespace {

// Copies x into scratch projected on the ball of radius u.
ConstVec truncated(ConstVec x, double u, std::vector<double>& scratch) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    if (norm2 <= u * u) return x;
    const double s = u / std::sqrt(norm2);
    scratch.assign(x.begin(), x.end());
    for (double& v : scratch) v *= s;
    return scratch;
}

} // namespace

void ModelSpec::eval_drift(double r, double t, ConstVec x, MutVec out) const {
    if (!truncation_radius) {
        drift(r, t, x, out);
        return;
    }
    thread_local std::vector<double> scratch;
    drift(r, t, truncated(x, *truncation_radius, scratch), out);
}

void ModelSpec::eval_diffusion(double r, double t, ConstVec x, MutVec out) const {
    if (!truncation_radius) {
        diffusion(r, t, x, out);
        return;
    }
    thread_local std::vector<double> scratch;
    diffusion(r, t, truncated(x, *truncation_radius, scratch), out);
}

double RateFunction::operator()(double v) const {
    const double u = (v - v0) / k;
    switch (kind) {
    case Kind::Exp:
        return scale * std::exp(-u);
    case Kind::Sigmoid:
        return scale / (1.0 + std::exp(-u));
    case Kind::Linoid:
        // scale * k * u / (1 - e^{-u}), removable at u = 0
        if (std::abs(u) < 1e-6) return scale * k * (1.0 + 0.5 * u);
        return scale * k * u / (-std::expm1(-u));
    }
    return 0.0;
}

namespace {

// Attaches the generic interaction derived from a factorization.
void attach_interaction(ModelSpec& m) {
    const Factorization fac = *m.factorized;
    const std::size_t dim = m.dim;
    m.interaction = [fac, dim](double r, double r2, ConstVec x, ConstVec y, MutVec out) {
        const double w = fac.connectivity(r, r2) * fac.pre(y);
        fac.post(x, out.first(dim));
        for (std::size_t i = 0; i < dim; ++i) out[i] *= w;
    };
}

} // namespace

ModelSpec make_firing_rate(const FiringRateParams& p, const geometry::ConnectivityKernel& k) {
    if (!(p.theta > 0.0)) throw InvalidArgument("firing-rate model needs theta > 0");
    if (!(p.sigma >= 0.0)) throw InvalidArgument("firing-rate model needs sigma >= 0");
    ModelSpec m;
    m.name = "firing_rate";
    m.dim = 1;
    m.noise_dim = 1;
    const double inv_theta = 1.0 / p.theta;
    if (p.input) {
        m.drift = [inv_theta, input = p.input](double r, double t, ConstVec x, MutVec out) {
            out[0] = -inv_theta * x[0] + input(r, t);
        };
    } else {
        m.drift = [inv_theta](double, double, ConstVec x, MutVec out) { out[0] = -inv_theta * x[0]; };
    }
    m.diffusion = [s = p.sigma](double, double, ConstVec, MutVec out) { out[0] = s; };
    m.factorized = Factorization{
        k,
        [g = p.gain](ConstVec y) { return sigmoid(g, y[0]); },
        [](ConstVec, MutVec out) { out[0] = 1.0; },
    };
    attach_interaction(m);
    return m;
}

ModelSpec make_fitzhugh_nagumo(const FitzHughNagumoParams& p, const geometry::ConnectivityKernel& k) {
    if (!(p.a > 0.0)) throw InvalidArgument("FitzHugh-Nagumo model needs a > 0");
    ModelSpec m;
    m.name = "fitzhugh_nagumo";
    m.dim = 3;
    m.noise_dim = 3;
    const SynapseParams syn = p.synapse;
    auto activation = [syn](double v) { return 0.5 + sigmoid(syn.gain, v - syn.threshold); };
    m.drift = [p, activation](double, double, ConstVec x, MutVec out) {
        const double v = x[0], w = x[1], y = x[2];
        out[0] = v - v * v * v - w + p.input;
        out[1] = p.a * (p.b * v - w);
        out[2] = p.synapse.rise * activation(v) * (1.0 - y) - p.synapse.decay * y;
    };
    m.diffusion = [p](double, double, ConstVec x, MutVec out) {
        std::fill(out.begin(), out.begin() + 9, 0.0);
        out[0] = p.sigma_v;
        out[4] = p.sigma_w;
        out[8] = p.synapse.sigma_y * chi(x[2]);
    };
    m.factorized = Factorization{
        k,
        [](ConstVec y) { return y[2]; },
        [v_rev = syn.v_rev](ConstVec x, MutVec out) {
            out[0] = x[0] - v_rev;
            out[1] = 0.0;
            out[2] = 0.0;
        },
    };
    m.project = [](MutVec x) { x[2] = std::clamp(x[2], 0.0, 1.0); };
    attach_interaction(m);
    return m;
}

ModelSpec make_hodgkin_huxley(const HodgkinHuxleyParams& p, const geometry::ConnectivityKernel& k) {
    if (!(p.capacitance > 0.0)) throw InvalidArgument("Hodgkin-Huxley model needs C > 0");
    if (!(p.channel_count > 0.0)) throw InvalidArgument("Hodgkin-Huxley model needs channel_count > 0");
    ModelSpec m;
    m.name = "hodgkin_huxley";
    m.dim = 4;
    m.noise_dim = 4;
    m.drift = [p](double, double, ConstVec x, MutVec out) {
        const double v = x[0], n = x[1], mm = x[2], h = x[3];
        const double i_k = p.g_k * n * n * n * n * (v - p.e_k);
        const double i_na = p.g_na * mm * mm * mm * h * (v - p.e_na);
        const double i_l = p.g_l * (v - p.e_l);
        out[0] = (p.input - i_k - i_na - i_l) / p.capacitance;
        out[1] = p.alpha_n(v) * (1.0 - n) - p.beta_n(v) * n;
        out[2] = p.alpha_m(v) * (1.0 - mm) - p.beta_m(v) * mm;
        out[3] = p.alpha_h(v) * (1.0 - h) - p.beta_h(v) * h;
    };
    m.diffusion = [p](double, double, ConstVec x, MutVec out) {
        std::fill(out.begin(), out.begin() + 16, 0.0);
        const double v = x[0];
        const double scale = 1.0 / std::sqrt(p.channel_count);
        auto gate = [&](const RateFunction& a, const RateFunction& b, double g) {
            const double rate = std::max(0.0, a(v) * (1.0 - g) + b(v) * g);
            return scale * std::sqrt(rate) * chi(g);
        };
        out[0] = p.sigma_ext / p.capacitance;
        out[5] = gate(p.alpha_n, p.beta_n, x[1]);
        out[10] = gate(p.alpha_m, p.beta_m, x[2]);
        out[15] = gate(p.alpha_h, p.beta_h, x[3]);
    };
    m.factorized = Factorization{
        k,
        [th = p.syn_threshold, sl = p.syn_slope](ConstVec y) {
            return 1.0 / (1.0 + std::exp(-(y[0] - th) / sl));
        },
        [v_rev = p.v_rev, c = p.capacitance](ConstVec x, MutVec out) {
            out[0] = (x[0] - v_rev) / c;
            out[1] = out[2] = out[3] = 0.0;
        },
    };
    m.project = [](MutVec x) {
        for (std::size_t i = 1; i < 4; ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
    };
    attach_interaction(m);
    return m;
}

double firing_rate_growth_constant(const geometry::ConnectivityKernel& k) {
    return (k.j_bar * 0.5) * (k.j_bar * 0.5);
}

double fitzhugh_nagumo_growth_constant(const FitzHughNagumoParams& p,
                                       const geometry::ConnectivityKernel& k) {
    // |J y (v - v_rev)|^2 <= J^2 (|v| + |v_rev|)^2 <= 2 J^2 max(1, v_rev^2) (1 + v^2)
    return 2.0 * k.j_bar * k.j_bar * std::max(1.0, p.synapse.v_rev * p.synapse.v_rev);
}

} // namespace nf::models
