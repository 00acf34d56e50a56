#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "nf/geometry.hpp"

namespace nf::models {

using ConstVec = std::span<const double>;
using MutVec = std::span<double>;

/// Standard-normal mass between 0 and g*x: Phi(g*x) - 1/2. Odd, increasing,
/// values in (-1/2, 1/2).
double sigmoid(double g, double x);

/// Factorized interaction b(r, r', x, y) = J(r, r') * pre(y) * post(x).
/// The simulators use it to aggregate presynaptic activity per population
/// instead of summing over every neuron pair.
struct Factorization {
    geometry::ConnectivityKernel connectivity;
    std::function<double(ConstVec y)> pre;
    std::function<void(ConstVec x, MutVec out)> post;
};

/// A neuron model: drift f(r, t, x), diffusion g(r, t, x) (dim x noise_dim,
/// row major) and interaction b(r, r', x, y).
struct ModelSpec {
    std::string name;
    std::size_t dim = 1;
    std::size_t noise_dim = 1;

    std::function<void(double r, double t, ConstVec x, MutVec out)> drift;
    std::function<void(double r, double t, ConstVec x, MutVec out)> diffusion;
    std::function<void(double r, double r2, ConstVec x, ConstVec y, MutVec out)> interaction;

    std::optional<Factorization> factorized;

    /// Projection applied to the state after every step (gating clamps).
    std::function<void(MutVec x)> project;

    /// Radius-U truncation of drift and diffusion: both are evaluated at the
    /// state projected on the ball |x| <= U. Disabled when empty.
    std::optional<double> truncation_radius;

    void eval_drift(double r, double t, ConstVec x, MutVec out) const;
    void eval_diffusion(double r, double t, ConstVec x, MutVec out) const;
};

using InputFn = std::function<double(double r, double t)>;

struct FiringRateParams {
    double theta = 1.0;
    double gain = 3.0;
    double sigma = 0.0;
    InputFn input;  ///< empty means I == 0
};

struct SynapseParams {
    double rise = 1.0;         ///< A
    double decay = 1.0;        ///< D
    double v_rev = 0.0;
    double sigma_y = 0.0;      ///< amplitude of sigma_Y(v, y) = sigma_y * chi(y)
    double gain = 5.0;         ///< slope of the presynaptic sigmoid
    double threshold = 0.0;
};

struct FitzHughNagumoParams {
    double a = 0.08;
    double b = 0.8;
    double input = 0.0;
    double sigma_v = 0.0;
    double sigma_w = 0.0;
    SynapseParams synapse;
};

/// Opening/closing rate family for the Hodgkin-Huxley gates.
struct RateFunction {
    enum class Kind { Exp, Linoid, Sigmoid };
    Kind kind = Kind::Exp;
    double scale = 1.0;
    double v0 = 0.0;
    double k = 1.0;

    double operator()(double v) const;
};

struct HodgkinHuxleyParams {
    double capacitance = 1.0;
    double g_k = 36.0, g_na = 120.0, g_l = 0.3;
    double e_k = -77.0, e_na = 50.0, e_l = -54.387;
    RateFunction alpha_n{RateFunction::Kind::Linoid, 0.01, -55.0, 10.0};
    RateFunction beta_n{RateFunction::Kind::Exp, 0.125, -65.0, 80.0};
    RateFunction alpha_m{RateFunction::Kind::Linoid, 0.1, -40.0, 10.0};
    RateFunction beta_m{RateFunction::Kind::Exp, 4.0, -65.0, 18.0};
    RateFunction alpha_h{RateFunction::Kind::Exp, 0.07, -65.0, 20.0};
    RateFunction beta_h{RateFunction::Kind::Sigmoid, 1.0, -35.0, 10.0};
    double input = 0.0;
    double sigma_ext = 0.0;
    double channel_count = 1.0;  ///< gating noise is divided by sqrt(channel_count)
    double v_rev = 0.0;
    double syn_threshold = -20.0;
    double syn_slope = 2.0;
};

/// Boundary-vanishing factor for proportion variables: clamp(4x(1-x), 0, 1).
double chi(double x);

ModelSpec make_firing_rate(const FiringRateParams& p, const geometry::ConnectivityKernel& k);
ModelSpec make_fitzhugh_nagumo(const FitzHughNagumoParams& p, const geometry::ConnectivityKernel& k);
ModelSpec make_hodgkin_huxley(const HodgkinHuxleyParams& p, const geometry::ConnectivityKernel& k);

/// Constant K such that |b(r, r', x, y)|^2 <= K (1 + |x|^2) for the presets.
double firing_rate_growth_constant(const geometry::ConnectivityKernel& k);
double fitzhugh_nagumo_growth_constant(const FitzHughNagumoParams& p,
                                       const geometry::ConnectivityKernel& k);

} // namespace nf::models
