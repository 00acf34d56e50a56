#include <gtest/gtest.h>

#include <cmath>

#include "nf/error.hpp"
#include "nf/moments.hpp"
#include "nf/picard.hpp"

using namespace nf;
using namespace nf::meanfield;

namespace {

std::vector<double> midpoints(std::size_t k) {
    std::vector<double> r(k);
    for (std::size_t a = 0; a < k; ++a) r[a] = (a + 0.5) / static_cast<double>(k);
    return r;
}

models::ModelSpec fig2_model(double j_bar = -3.0) {
    models::FiringRateParams p;
    p.sigma = 0.1;
    return models::make_firing_rate(p, geometry::ConnectivityKernel(j_bar, 1.0));
}

geometry::Kernels fig2_kernels(double j_bar = -3.0) {
    return {geometry::ConnectivityKernel(j_bar, 1.0), geometry::DelayKernel(1.0, 0.4)};
}

PicardConfig base(std::size_t per_location, double t_end) {
    PicardConfig c;
    c.particles_per_location = per_location;
    c.t_end = t_end;
    c.dt = 1e-2;
    c.seed = 99;
    c.init_mean = 0.2;
    c.init_variance = 0.005;
    return c;
}

} // namespace

TEST(Picard, RejectsTinyEnsembleAndUnfactorizedModels) {
    EXPECT_THROW(PicardSolver(fig2_model(), fig2_kernels(), {0.5}, base(1, 1.0)), InvalidArgument);
    auto m = fig2_model();
    m.factorized.reset();
    EXPECT_THROW(PicardSolver(m, fig2_kernels(), {0.5}, base(10, 1.0)), InvalidArgument);
}

TEST(Picard, ZeroCouplingIsAlreadyTheFixedPoint) {
    PicardSolver s(fig2_model(0.0), fig2_kernels(0.0), midpoints(4), base(50, 2.0));
    s.iterate();
    s.iterate();
    for (double d : s.report().distances) EXPECT_EQ(d, 0.0);
}

TEST(Picard, DeterministicPerSeed) {
    auto run = [] {
        PicardSolver s(fig2_model(), fig2_kernels(), midpoints(8), base(40, 2.0));
        for (int k = 0; k < 3; ++k) s.iterate();
        return s.report().distances;
    };
    EXPECT_EQ(run(), run());
}

TEST(Picard, IteratesSettleOnTheDelayGrid) {
    // iterate k reproduces iterate k-1 on [0, (k-1) tau_s]
    PicardSolver s(fig2_model(), fig2_kernels(), midpoints(8), base(40, 1.2));
    for (int k = 0; k < 5; ++k) s.iterate();
    const auto& d = s.report().distances;
    EXPECT_GT(d[0], 0.0);
    EXPECT_GT(d[2], 0.0);
    EXPECT_EQ(d[3], 0.0);
    EXPECT_EQ(d[4], 0.0);
}

TEST(Picard, DistancesContractAfterTransient) {
    PicardSolver s(fig2_model(), fig2_kernels(), midpoints(16), base(125, 2.5));
    for (int k = 0; k < 6; ++k) s.iterate();
    const auto& d = s.report().distances;
    for (std::size_t k = 2; k < d.size(); ++k) EXPECT_LT(d[k], d[k - 1]);
    EXPECT_LT(d[5] / d[0], 0.05);
}

TEST(Picard, FixedPointMatchesMomentEquations) {
    const std::size_t K = 32, n = 625;
    const double t_end = 1.6;
    PicardSolver s(fig2_model(), fig2_kernels(), midpoints(K), base(n, t_end));
    for (int k = 0; k < 4; ++k) s.iterate();
    const auto& e = s.ensemble();

    MomentParams mp;
    mp.sigma = 0.1;
    MomentConfig mc;
    mc.grid_size = K;
    mc.dt = 1e-2;
    mc.t_end = t_end;
    mc.record_stride = 10;
    mc.initial_mean = [](double, double) { return 0.2; };
    mc.initial_variance = [](double, double) { return 0.005; };
    const auto f = solve_moments(mp, fig2_kernels(), mc);
    ASSERT_EQ(f.frames(), e.times.size());
    for (std::size_t k = 0; k < f.frames(); ++k) {
        double pm = 0.0, pv = 0.0;
        for (std::size_t a = 0; a < K; ++a) {
            pm += e.mean[k * K + a] / K;
            pv += e.variance[k * K + a] / K;
        }
        const double v = f.variance_row(k)[0];
        const double n_tot = static_cast<double>(K * n);
        EXPECT_NEAR(pm, f.mean_row(k)[0], 3.0 * std::sqrt(v / n_tot) + 1e-12) << "t=" << f.times[k];
        EXPECT_NEAR(pv, v, 3.0 * v * std::sqrt(2.0 / n_tot) + 1e-12) << "t=" << f.times[k];
    }
}
