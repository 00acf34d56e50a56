#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace nf::bifurcation {

using cplx = std::complex<double>;

/// Which closed form stands for the Fourier symbol of the delayed kernel
/// r' -> exp(-d/delta - xi d/c) on the unit circle.
///  - Circle: the exact mode-k symbol of the two-sided kernel on the circle,
///    2a(1 - (-1)^k e^{-a/2}) / (a^2 + 4 pi^2 k^2), a = 1/delta + xi/c.
///  - Printed: the one-sided form (1 - e^{-a}) / (a + i 2 pi k).
enum class SymbolForm { Circle, Printed };

/// One-sided symbol (1 - e^{-a}) / (a + i 2 pi k), a = 1/delta + xi/c.
/// Throws when |a + i 2 pi k| < 1e-12.
cplx z_kernel(int k, cplx xi, double delta, double c);

/// Exact symbol of the circle kernel for wavenumber k.
/// Throws when |a^2 + 4 pi^2 k^2| < 1e-12.
cplx circle_symbol(int k, cplx xi, double delta, double c);

cplx symbol(SymbolForm form, int k, cplx xi, double delta, double c);

/// Linearization parameters around the homogeneous Gaussian equilibrium
/// (theta = 1).
struct DispersionParams {
    double j_bar = -3.0;
    double g = 3.0;
    double delta = 1.0;
    double c = 1.0;
    double sigma = 0.1;
    double tau_s = 0.4;
    int k = 0;
    int m = 0;
    SymbolForm form = SymbolForm::Circle;

    double v0() const { return 0.5 * sigma * sigma; }
    /// Slope of F(., v0) at 0: g / sqrt(1 + g^2 v0) / sqrt(2 pi).
    double f0_prime() const;
    /// Effective linear gain j_bar * F0'.
    double gain() const { return j_bar * f0_prime(); }

    void validate() const;
};

/// (xi + 1) - G e^{-xi tau_s} Z_k(xi). Zero iff xi is a characteristic root.
cplx dispersion_residual(cplx xi, const DispersionParams& p);

/// d/dxi of the residual.
cplx dispersion_derivative(cplx xi, const DispersionParams& p);

struct SearchBox {
    double re_min = -5.0, re_max = 2.0;
    double im_min = -50.0, im_max = 50.0;
};

struct Root {
    int k = 0;
    cplx xi;
    double residual = 0.0;
};

/// A box of the winding-number quadtree where Newton did not converge.
struct Unresolved {
    int k = 0;
    SearchBox box;
    int count = 0;
};

struct RootSet {
    std::vector<Root> roots;
    std::vector<Unresolved> unresolved;

    /// Root with the largest real part, if any.
    std::optional<Root> rightmost() const;
};

constexpr double kRootTolerance = 1e-9;

/// Number of zeros of the residual inside the box, by the argument
/// principle on its boundary. Returns nullopt when a zero sits on the
/// contour. `min_samples_per_edge` is the initial sampling before adaptive
/// refinement.
std::optional<int> count_roots(const DispersionParams& p, const SearchBox& box,
                               int min_samples_per_edge = 8);

/// All roots in the box for every wavenumber in [k_min, k_max]. Winding
/// numbers isolate each root, Newton polishes it to |residual| < 1e-9.
RootSet find_roots(const DispersionParams& p, const SearchBox& box, int k_min, int k_max);

struct HopfSample {
    double omega = 0.0;
    double sigma = 0.0;
    double tau_s = 0.0;
};

struct HopfCurve {
    int k = 0;
    int m = 0;
    std::vector<HopfSample> samples;
};

/// Turing-Hopf curve for wavenumber k and branch m over the omega grid.
/// sigma^2 comes from the modulus condition, then F0' from that sigma, then
/// tau_s from the phase condition with Arg(G Z_k(i omega)). Samples with
/// sigma^2 < 0 or tau_s < 0 are dropped; omega <= 0 is rejected.
HopfCurve hopf_curve(int k, int m, const std::vector<double>& omegas, const DispersionParams& base);

enum class Regime { Stable, Marginal, TuringStatic, TuringHopf };

struct Classification {
    Regime regime = Regime::Stable;
    int k = 0;
    double omega = 0.0;
    std::optional<Root> rightmost;
    std::size_t unresolved = 0;
};

constexpr double kMarginalTolerance = 1e-6;

Classification classify(const DispersionParams& p, int k_min, int k_max, const SearchBox& box = {});

const char* to_string(Regime r);

/// Eigenvalues of the M-point discretization of the delayed linear operator
/// u -> integral J(r, r') e^{-xi tau(r, r')} u(r') dlambda(r'), computed with
/// a dense complex eigensolver and sorted by decreasing magnitude.
std::vector<cplx> kernel_eigen_oracle(const DispersionParams& p, cplx xi, std::size_t grid_size,
                                      double origin = 0.0);

} // namespace nf::bifurcation
