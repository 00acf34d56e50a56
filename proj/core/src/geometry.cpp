#include "nf/geometry.hpp"

#include <cmath>

#include "nf/error.hpp"
#include "nf/random.hpp"

namespace nf::geometry {

double wrap(double r) {
    double w = r - std::floor(r);
    // floor can round r = -1e-18 up to exactly 1.0
    return w >= 1.0 ? 0.0 : w;
}

double circle_distance(double r, double r2) {
    const double d = std::abs(wrap(r) - wrap(r2));
    return std::min(d, 1.0 - d);
}

ConnectivityKernel::ConnectivityKernel(double j_bar_, double delta_) : j_bar(j_bar_), delta(delta_) {
    if (!(delta > 0.0)) throw InvalidArgument("connectivity length delta must be > 0");
}

double ConnectivityKernel::at_distance(double d) const { return j_bar * std::exp(-d / delta); }

double ConnectivityKernel::operator()(double r, double r2) const {
    return at_distance(circle_distance(r, r2));
}

DelayKernel::DelayKernel(double c_, double tau_s_) : c(c_), tau_s(tau_s_) {
    if (!(c > 0.0)) throw InvalidArgument("propagation speed c must be > 0");
    if (!(tau_s >= 0.0)) throw InvalidArgument("synaptic delay tau_s must be >= 0");
}

double DelayKernel::at_distance(double d) const { return d / c + tau_s; }

double DelayKernel::operator()(double r, double r2) const {
    return at_distance(circle_distance(r, r2));
}

double eval_connectivity(const ConnectivityKernel& k, double r, double r2) { return k(r, r2); }
double eval_delay(const DelayKernel& k, double r, double r2) { return k(r, r2); }

QuadratureGrid build_grid(const SpatialDomain&, std::size_t m) {
    if (m == 0) throw InvalidArgument("quadrature grid needs m >= 1 nodes");
    QuadratureGrid grid;
    grid.nodes.resize(m);
    grid.weights.assign(m, 1.0 / static_cast<double>(m));
    for (std::size_t j = 0; j < m; ++j)
        grid.nodes[j] = static_cast<double>(j) / static_cast<double>(m);
    return grid;
}

std::vector<double> sample_locations(const SpatialDomain&, std::size_t count, std::uint64_t seed) {
    random::Engine rng(seed);
    std::vector<double> out(count);
    for (auto& r : out) r = random::uniform01(rng);
    return out;
}

} // namespace nf::geometry
