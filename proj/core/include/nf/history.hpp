#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nf {

/// Ring buffer of past states at step resolution covering a fixed delay
/// horizon. Row n holds the state at time n * dt (n >= 0). Queries before 0
/// are answered by the initial-condition function; queries between stored
/// steps interpolate linearly.
class HistoryBuffer {
public:
    /// (channel, t) -> value for t in [-horizon, 0].
    using InitialFn = std::function<double(std::size_t channel, double t)>;

    HistoryBuffer(std::size_t width, double dt, double horizon, InitialFn initial);

    std::size_t width() const { return width_; }
    double dt() const { return dt_; }
    double horizon() const { return horizon_; }
    std::size_t steps() const { return steps_; }
    double current_time() const { return static_cast<double>(steps_) * dt_; }

    /// Latest stored row (time current_time()).
    std::span<const double> current() const { return row(steps_); }

    /// Appends the row for time (steps() + 1) * dt.
    void commit(std::span<const double> values);

    /// Value of `channel` at time t. Throws InvalidArgument when t lies below
    /// -horizon, outside the retained window, or after current_time().
    double lookup(std::size_t channel, double t) const;

    /// All channels at time t.
    void lookup_row(double t, std::span<double> out) const;

    /// Initial-condition value, bypassing the ring.
    double initial(std::size_t channel, double t) const { return initial_(channel, t); }

private:
    struct Bracket {
        bool before_zero;
        std::size_t lo;
        double frac;
    };
    Bracket locate(double t) const;
    std::span<const double> row(std::size_t n) const;

    std::size_t width_;
    double dt_;
    double horizon_;
    InitialFn initial_;
    std::size_t capacity_;
    std::size_t steps_ = 0;
    std::vector<double> ring_;
};

} // namespace nf
