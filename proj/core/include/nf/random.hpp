#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace nf::random {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `index` under `master`. Depends only on the pair, so
/// streams can be created in any order on any thread.
std::uint64_t mix(std::uint64_t master, std::uint64_t index);

/// xoshiro256++ (32 bytes of state). Satisfies UniformRandomBitGenerator so
/// it plugs into the <random> distributions.
class Engine {
public:
    using result_type = std::uint64_t;

    explicit Engine(std::uint64_t seed = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

/// One independent standard-normal stream.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed = 0) : engine_(seed) {}

    double operator()() { return dist_(engine_); }
    Engine& engine() { return engine_; }

private:
    Engine engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

} // namespace nf::random
