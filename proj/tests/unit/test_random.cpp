#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nf/random.hpp"

using namespace nf::random;

TEST(Random, SplitmixIsDeterministicAndMixes) {
    EXPECT_EQ(splitmix64(1), splitmix64(1));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(mix(7, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(mix(1, 2), mix(2, 1));
}

TEST(Random, EngineReproducible) {
    Engine a(5), b(5), c(6);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        ASSERT_EQ(x, b());
        differs = differs || x != c();
    }
    EXPECT_TRUE(differs);
}

TEST(Random, UniformInUnitInterval) {
    Engine e(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = uniform01(e);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Random, NormalMomentsWithinCltBand) {
    NormalStream z(11);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = z();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(double(n)));
    EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}
