#pragma once

#include <cstdint>
#include <vector>

namespace nf::geometry {

enum class DomainKind { Circle };
enum class MeasureKind { Uniform };

/// The spatial domain: the unit-circumference circle with the uniform
/// probability measure. Points are stored in [0, 1).
struct SpatialDomain {
    DomainKind kind = DomainKind::Circle;
    MeasureKind measure = MeasureKind::Uniform;
};

/// Wraps any real number into [0, 1).
double wrap(double r);

/// Geodesic distance on the unit-circumference circle, in [0, 0.5].
double circle_distance(double r, double r2);

/// J(r, r') = j_bar * exp(-d(r, r') / delta).
struct ConnectivityKernel {
    double j_bar = 0.0;
    double delta = 1.0;

    ConnectivityKernel() = default;
    ConnectivityKernel(double j_bar, double delta);

    double operator()(double r, double r2) const;
    double at_distance(double d) const;
};

/// tau(r, r') = d(r, r') / c + tau_s, bounded by tau_max = 0.5 / c + tau_s.
struct DelayKernel {
    double c = 1.0;
    double tau_s = 0.0;

    DelayKernel() = default;
    DelayKernel(double c, double tau_s);

    double operator()(double r, double r2) const;
    double at_distance(double d) const;
    double tau_max() const { return 0.5 / c + tau_s; }
};

struct Kernels {
    ConnectivityKernel connectivity;
    DelayKernel delay;
};

double eval_connectivity(const ConnectivityKernel& k, double r, double r2);
double eval_delay(const DelayKernel& k, double r, double r2);

/// Quadrature rule for integrals against the uniform measure.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

/// Uniform periodic trapezoid: nodes j/m, weights 1/m.
QuadratureGrid build_grid(const SpatialDomain& domain, std::size_t m);

/// `count` i.i.d. draws from the domain measure. Identical seed gives an
/// identical sequence.
std::vector<double> sample_locations(const SpatialDomain& domain, std::size_t count,
                                     std::uint64_t seed);

} // namespace nf::geometry
