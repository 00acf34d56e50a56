#include "nf/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "nf/error.hpp"
#include "nf/geometry.hpp"

namespace nf::bifurcation {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// (1 - e^{-u}) / u, regular at u = 0.
cplx one_minus_exp_over(cplx u) {
    if (std::abs(u) < 1e-3) return 1.0 - u / 2.0 + u * u / 6.0 - u * u * u / 24.0;
    return (1.0 - std::exp(-u)) / u;
}

// Symbols with their removable singularities filled in.
cplx printed_regular(int k, cplx xi, double delta, double c) {
    const cplx a = 1.0 / delta + xi / c;
    const cplx den = a + kI * (2.0 * kPi * k);
    // e^{-a} = e^{-den} since e^{i 2 pi k} = 1
    return one_minus_exp_over(den);
}

cplx circle_regular(int k, cplx xi, double delta, double c) {
    const cplx a = 1.0 / delta + xi / c;
    const double b = 2.0 * kPi * k;
    if (k == 0) return one_minus_exp_over(a / 2.0);
    const double s = (k % 2 == 0) ? 1.0 : -1.0;
    for (double sign : {1.0, -1.0}) {
        const cplx u = a - sign * kI * b;
        if (std::abs(u) < 1e-3) return 2.0 * a / (2.0 * sign * kI * b + u) * 0.5 * one_minus_exp_over(u / 2.0);
    }
    return 2.0 * a * (1.0 - s * std::exp(-a / 2.0)) / (a * a + b * b);
}

cplx symbol_regular(SymbolForm form, int k, cplx xi, double delta, double c) {
    return form == SymbolForm::Circle ? circle_regular(k, xi, delta, c) : printed_regular(k, xi, delta, c);
}

} // namespace

cplx z_kernel(int k, cplx xi, double delta, double c) {
    const cplx a = 1.0 / delta + xi / c;
    const cplx den = a + kI * (2.0 * kPi * k);
    if (std::abs(den) < 1e-12) throw InvalidArgument("z_kernel denominator vanishes");
    return (1.0 - std::exp(-a)) / den;
}

cplx circle_symbol(int k, cplx xi, double delta, double c) {
    const cplx a = 1.0 / delta + xi / c;
    const double b = 2.0 * kPi * k;
    const cplx den = a * a + b * b;
    if (std::abs(den) < 1e-12) throw InvalidArgument("circle symbol denominator vanishes");
    const double s = (k % 2 == 0) ? 1.0 : -1.0;
    return 2.0 * a * (1.0 - s * std::exp(-a / 2.0)) / den;
}

cplx symbol(SymbolForm form, int k, cplx xi, double delta, double c) {
    return form == SymbolForm::Circle ? circle_symbol(k, xi, delta, c) : z_kernel(k, xi, delta, c);
}

double DispersionParams::f0_prime() const {
    return g / std::sqrt(1.0 + g * g * v0()) / std::sqrt(2.0 * kPi);
}

void DispersionParams::validate() const {
    if (!(delta > 0.0)) throw InvalidArgument("delta must be > 0");
    if (!(c > 0.0)) throw InvalidArgument("c must be > 0");
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
}

cplx dispersion_residual(cplx xi, const DispersionParams& p) {
    return (xi + 1.0) - p.gain() * std::exp(-xi * p.tau_s) * symbol_regular(p.form, p.k, xi, p.delta, p.c);
}

cplx dispersion_derivative(cplx xi, const DispersionParams& p) {
    const double h = 1e-6 * (1.0 + std::abs(xi));
    return (dispersion_residual(xi + h, p) - dispersion_residual(xi - h, p)) / (2.0 * h);
}

std::optional<Root> RootSet::rightmost() const {
    if (roots.empty()) return std::nullopt;
    return *std::max_element(roots.begin(), roots.end(),
                             [](const Root& a, const Root& b) { return a.xi.real() < b.xi.real(); });
}

namespace {

using Fn = std::function<cplx(cplx)>;

// Accumulated argument change of f along [z0, z1], refined until every
// sub-step turns by less than pi/4. Returns false when f vanishes on the path.
bool arg_change(const Fn& f, cplx z0, cplx f0, cplx z1, cplx f1, int depth, double& total) {
    if (std::abs(f1) < 1e-13 || std::abs(f0) < 1e-13) return false;
    const double d = std::arg(f1 / f0);
    if (std::abs(d) < kPi / 4.0 || depth > 40) {
        if (depth > 40) return false;
        total += d;
        return true;
    }
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = f(zm);
    return arg_change(f, z0, f0, zm, fm, depth + 1, total) && arg_change(f, zm, fm, z1, f1, depth + 1, total);
}

std::optional<int> winding(const Fn& f, const SearchBox& b, int min_samples) {
    const cplx corners[5] = {{b.re_min, b.im_min}, {b.re_max, b.im_min}, {b.re_max, b.im_max},
                             {b.re_min, b.im_max}, {b.re_min, b.im_min}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const cplx z0 = corners[e], z1 = corners[e + 1];
        const int samples = std::max(min_samples, static_cast<int>(std::ceil(std::abs(z1 - z0) / 0.25)));
        cplx za = z0, fa = f(za);
        for (int s = 1; s <= samples; ++s) {
            const cplx zb = z0 + (z1 - z0) * (static_cast<double>(s) / samples);
            const cplx fb = f(zb);
            if (!arg_change(f, za, fa, zb, fb, 0, total)) return std::nullopt;
            za = zb;
            fa = fb;
        }
    }
    const double n = total / (2.0 * kPi);
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 0.1) return std::nullopt;
    return static_cast<int>(rounded);
}

struct Isolator {
    const DispersionParams& p;
    Fn f;
    RootSet& out;

    std::optional<cplx> newton(cplx z, const SearchBox& b) const {
        const double w = std::max(b.re_max - b.re_min, b.im_max - b.im_min);
        for (int it = 0; it < 80; ++it) {
            const cplx fz = f(z);
            const cplx step = fz / dispersion_derivative(z, p);
            z -= step;
            if (z.real() < b.re_min - w || z.real() > b.re_max + w || z.imag() < b.im_min - w ||
                z.imag() > b.im_max + w)
                return std::nullopt;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
        }
        if (std::abs(f(z)) >= kRootTolerance) return std::nullopt;
        const double slack = 1e-7 * (1.0 + w);
        if (z.real() < b.re_min - slack || z.real() > b.re_max + slack || z.imag() < b.im_min - slack ||
            z.imag() > b.im_max + slack)
            return std::nullopt;
        return z;
    }

    std::optional<std::pair<SearchBox, SearchBox>> split(const SearchBox& b, double frac) const {
        SearchBox lo = b, hi = b;
        if (b.re_max - b.re_min >= b.im_max - b.im_min) {
            const double x = b.re_min + frac * (b.re_max - b.re_min);
            lo.re_max = hi.re_min = x;
        } else {
            const double y = b.im_min + frac * (b.im_max - b.im_min);
            lo.im_max = hi.im_min = y;
        }
        return std::make_pair(lo, hi);
    }

    void record(cplx z) {
        for (const Root& r : out.roots)
            if (r.k == p.k && std::abs(r.xi - z) < 1e-8) return;
        out.roots.push_back({p.k, z, std::abs(f(z))});
    }

    void isolate(const SearchBox& b, int count, int depth) {
        if (count <= 0) return;
        const double w = std::max(b.re_max - b.re_min, b.im_max - b.im_min);
        if (count == 1 && w <= 0.5) {
            const cplx center{0.5 * (b.re_min + b.re_max), 0.5 * (b.im_min + b.im_max)};
            if (auto z = newton(center, b)) {
                record(*z);
                return;
            }
        }
        if (w < 1e-8 || depth > 80) {
            const cplx center{0.5 * (b.re_min + b.re_max), 0.5 * (b.im_min + b.im_max)};
            if (auto z = newton(center, b)) {
                record(*z);
                return;
            }
            out.unresolved.push_back({p.k, b, count});
            return;
        }
        for (double frac : {0.5137, 0.4711, 0.5523, 0.4302}) {
            auto halves = split(b, frac);
            const auto c1 = winding(f, halves->first, 4);
            const auto c2 = winding(f, halves->second, 4);
            if (!c1 || !c2 || *c1 < 0 || *c2 < 0) continue;
            isolate(halves->first, *c1, depth + 1);
            isolate(halves->second, *c2, depth + 1);
            return;
        }
        out.unresolved.push_back({p.k, b, count});
    }
};

} // namespace

std::optional<int> count_roots(const DispersionParams& p, const SearchBox& box, int min_samples_per_edge) {
    return winding([&p](cplx z) { return dispersion_residual(z, p); }, box, min_samples_per_edge);
}

RootSet find_roots(const DispersionParams& base, const SearchBox& box, int k_min, int k_max) {
    base.validate();
    if (!(std::isfinite(box.re_min) && std::isfinite(box.re_max) && std::isfinite(box.im_min) &&
          std::isfinite(box.im_max)) ||
        box.re_min >= box.re_max || box.im_min >= box.im_max)
        throw InvalidArgument("search box must be finite and nonempty");
    RootSet out;
    for (int k = k_min; k <= k_max; ++k) {
        DispersionParams p = base;
        p.k = k;
        Isolator iso{p, [&p](cplx z) { return dispersion_residual(z, p); }, out};
        SearchBox b = box;
        std::optional<int> n;
        for (int attempt = 0; attempt < 5 && !n; ++attempt) {
            n = winding(iso.f, b, 8);
            if (!n) {
                b.re_min -= 1e-6;
                b.re_max += 1.3e-6;
                b.im_min -= 1.7e-6;
                b.im_max += 1.1e-6;
            }
        }
        if (!n) {
            out.unresolved.push_back({k, box, -1});
            continue;
        }
        iso.isolate(b, *n, 0);
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        if (a.k != b.k) return a.k < b.k;
        if (a.xi.real() != b.xi.real()) return a.xi.real() > b.xi.real();
        return a.xi.imag() < b.xi.imag();
    });
    return out;
}

HopfCurve hopf_curve(int k, int m, const std::vector<double>& omegas, const DispersionParams& base) {
    base.validate();
    HopfCurve curve{k, m, {}};
    for (double omega : omegas) {
        if (!(omega > 0.0)) throw InvalidArgument("hopf_curve needs omega > 0");
        const cplx z = symbol_regular(base.form, k, cplx{0.0, omega}, base.delta, base.c);
        const double g2 = base.g * base.g;
        const double sigma2 =
            2.0 / g2 * (-1.0 + base.j_bar * base.j_bar * g2 * std::norm(z) / (2.0 * kPi * (1.0 + omega * omega)));
        if (sigma2 < 0.0) continue;
        DispersionParams p = base;
        p.sigma = std::sqrt(sigma2);
        const double tau = (-std::atan(omega) + std::arg(p.gain() * z) + 2.0 * kPi * m) / omega;
        if (tau < 0.0) continue;
        curve.samples.push_back({omega, p.sigma, tau});
    }
    return curve;
}

Classification classify(const DispersionParams& p, int k_min, int k_max, const SearchBox& box) {
    const RootSet set = find_roots(p, box, k_min, k_max);
    Classification out;
    out.unresolved = set.unresolved.size();
    out.rightmost = set.rightmost();
    if (!out.rightmost) return out;
    const Root& r = *out.rightmost;
    out.k = r.k;
    if (std::abs(r.xi.real()) <= kMarginalTolerance) {
        out.regime = Regime::Marginal;
        out.omega = std::abs(r.xi.imag());
    } else if (r.xi.real() < 0.0) {
        out.regime = Regime::Stable;
    } else if (std::abs(r.xi.imag()) > kMarginalTolerance) {
        out.regime = Regime::TuringHopf;
        out.omega = std::abs(r.xi.imag());
    } else {
        out.regime = Regime::TuringStatic;
    }
    return out;
}

const char* to_string(Regime r) {
    switch (r) {
    case Regime::Stable: return "stable";
    case Regime::Marginal: return "marginal";
    case Regime::TuringStatic: return "turing_static";
    case Regime::TuringHopf: return "turing_hopf";
    }
    return "unknown";
}

std::vector<cplx> kernel_eigen_oracle(const DispersionParams& p, cplx xi, std::size_t grid_size,
                                      double origin) {
    if (grid_size < 32) throw InvalidArgument("kernel_eigen_oracle needs at least 32 grid points");
    p.validate();
    const auto m = static_cast<Eigen::Index>(grid_size);
    Eigen::MatrixXcd a(m, m);
    const double w = 1.0 / static_cast<double>(grid_size);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double r = origin + static_cast<double>(i) * w;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double r2 = origin + static_cast<double>(j) * w;
            const double d = geometry::circle_distance(r, r2);
            const double tau = d / p.c + p.tau_s;
            a(i, j) = w * p.j_bar * std::exp(-d / p.delta) * std::exp(-xi * tau);
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    std::vector<cplx> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return std::abs(x) > std::abs(y); });
    return ev;
}

} // namespace nf::bifurcation
