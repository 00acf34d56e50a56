#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nf/error.hpp"
#include "nf/history.hpp"

using nf::HistoryBuffer;

TEST(History, StoredStepReturnsExactValue) {
    HistoryBuffer h(1, 0.1, 0.5, [](std::size_t, double) { return 0.0; });
    for (int n = 1; n <= 3; ++n) {
        const std::vector<double> row{0.1 * n * n};
        h.commit(row);
    }
    EXPECT_EQ(h.lookup(0, 0.2), 0.1 * 2 * 2);
    EXPECT_EQ(h.lookup(0, 0.3), 0.1 * 3 * 3);
    EXPECT_EQ(h.current()[0], 0.1 * 3 * 3);
}

TEST(History, MidpointInterpolates) {
    HistoryBuffer h(1, 0.1, 0.5, [](std::size_t, double) { return 0.0; });
    h.commit(std::vector<double>{1.0});
    EXPECT_DOUBLE_EQ(h.lookup(0, 0.05), 0.5);
}

TEST(History, NegativeTimesUseInitialCondition) {
    const double tau = 0.8;
    HistoryBuffer h(2, 0.01, tau, [](std::size_t c, double t) { return c == 0 ? std::sin(t) : 2.0; });
    for (int n = 0; n < 5; ++n) h.commit(std::vector<double>{1.0, 1.0});
    EXPECT_DOUBLE_EQ(h.lookup(0, -tau / 2), std::sin(-tau / 2));
    EXPECT_DOUBLE_EQ(h.lookup(1, -tau), 2.0);
    EXPECT_DOUBLE_EQ(h.lookup(0, 0.0), std::sin(0.0));
}

TEST(History, RejectsOutOfRangeQueries) {
    HistoryBuffer h(1, 0.1, 0.3, [](std::size_t, double) { return 0.0; });
    EXPECT_THROW(h.lookup(0, -0.31), nf::InvalidArgument);
    EXPECT_THROW(h.lookup(0, 0.05), nf::InvalidArgument);
    for (int n = 0; n < 20; ++n) h.commit(std::vector<double>{double(n)});
    // retained window covers [t - horizon, t]
    EXPECT_NO_THROW(h.lookup(0, h.current_time() - 0.3));
    EXPECT_THROW(h.lookup(0, 0.2), nf::InvalidArgument);
    EXPECT_THROW(h.lookup(0, h.current_time() + 0.05), nf::InvalidArgument);
}

TEST(History, LookupRowMatchesChannels) {
    HistoryBuffer h(3, 0.5, 1.0, [](std::size_t c, double) { return double(c); });
    h.commit(std::vector<double>{3.0, 4.0, 5.0});
    std::vector<double> out(3);
    h.lookup_row(0.25, out);
    EXPECT_DOUBLE_EQ(out[0], 1.5);
    EXPECT_DOUBLE_EQ(out[1], 2.5);
    EXPECT_DOUBLE_EQ(out[2], 3.5);
}
