#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <cstdlib>
#include <sstream>

#include "nf/error.hpp"
#include "nf/io.hpp"

using namespace nf;

TEST(FormatDouble, RoundTrips) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
    }
    for (double x : {0.0, 1.0, -0.1, 1e-300, std::numeric_limits<double>::denorm_min(), 1.7976931348623157e308})
        EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Csv, HeaderAndRows) {
    std::ostringstream os;
    io::CsvWriter w(os, {"a", "b", "c"});
    w.cell(1.5).cell(std::int64_t{-2}).cell("x");
    w.end_row();
    EXPECT_EQ(os.str(), "a,b,c\n1.5,-2,x\n");
}

TEST(Csv, WidthMismatchThrows) {
    std::ostringstream os;
    io::CsvWriter w(os, {"a", "b"});
    w.cell(1.0);
    EXPECT_THROW(w.end_row(), Error);
    io::CsvWriter w2(os, {"a"});
    w2.cell(1.0);
    EXPECT_THROW(w2.cell(2.0), Error);
}

TEST(Trajectory, CsvLayout) {
    network::TrajectoryRecord rec;
    rec.neurons = 2;
    rec.dim = 2;
    rec.times = {0.0, 0.5};
    rec.states = {1, 2, 3, 4, 5, 6, 7, 8};
    const auto layout = network::layout_with_locations({1, 1}, {0.0, 0.5});
    std::ostringstream os;
    io::write_trajectory_csv(os, rec, layout);
    EXPECT_EQ(os.str(), "time,neuron_id,population,x0,x1\n0,0,0,1,2\n0,1,1,3,4\n0.5,0,0,5,6\n0.5,1,1,7,8\n");
}

TEST(Trajectory, BinaryRoundTrip) {
    network::TrajectoryRecord rec;
    rec.neurons = 3;
    rec.dim = 4;
    for (int k = 0; k < 5; ++k) rec.times.push_back(0.1 * k);
    for (int i = 0; i < 60; ++i) rec.states.push_back(std::sin(i) * 1e3);
    std::stringstream ss;
    io::write_trajectory_binary(ss, rec, 7);
    std::uint64_t stride = 0;
    const auto back = io::read_trajectory_binary(ss, &stride);
    EXPECT_EQ(stride, 7u);
    EXPECT_EQ(back.neurons, rec.neurons);
    EXPECT_EQ(back.dim, rec.dim);
    EXPECT_EQ(back.times, rec.times);
    EXPECT_EQ(back.states, rec.states);
}

TEST(Trajectory, BinaryRejectsGarbageAndTruncation) {
    std::stringstream bad("XXXX");
    EXPECT_THROW(io::read_trajectory_binary(bad), Error);
    network::TrajectoryRecord rec;
    rec.neurons = 2;
    rec.times = {0.0};
    rec.states = {1, 2};
    std::stringstream ss;
    io::write_trajectory_binary(ss, rec, 1);
    std::string bytes = ss.str();
    bytes.resize(bytes.size() - 3);
    std::stringstream cut(bytes);
    EXPECT_THROW(io::read_trajectory_binary(cut), Error);
}

TEST(Hash, KnownValues) {
    EXPECT_EQ(io::hex64(io::fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(io::hex64(io::fnv1a("a")), "af63dc4c8601ec8c");
    EXPECT_EQ(io::hex64(1), "0000000000000001");
}
