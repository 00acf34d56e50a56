#include "nf/history.hpp"

#include <cmath>
#include <string>

#include "nf/error.hpp"

namespace nf {

HistoryBuffer::HistoryBuffer(std::size_t width, double dt, double horizon, InitialFn initial)
    : width_(width), dt_(dt), horizon_(horizon), initial_(std::move(initial)) {
    if (!(dt > 0.0)) throw InvalidArgument("history buffer needs dt > 0");
    if (!(horizon >= 0.0)) throw InvalidArgument("history buffer needs horizon >= 0");
    if (!initial_) throw InvalidArgument("history buffer needs an initial-condition function");
    capacity_ = static_cast<std::size_t>(std::ceil(horizon / dt)) + 2;
    ring_.resize(capacity_ * width_);
    for (std::size_t c = 0; c < width_; ++c) ring_[c] = initial_(c, 0.0);
}

std::span<const double> HistoryBuffer::row(std::size_t n) const {
    return {ring_.data() + (n % capacity_) * width_, width_};
}

void HistoryBuffer::commit(std::span<const double> values) {
    if (values.size() != width_) throw InvalidArgument("history commit width mismatch");
    ++steps_;
    std::copy(values.begin(), values.end(), ring_.begin() + (steps_ % capacity_) * width_);
}

HistoryBuffer::Bracket HistoryBuffer::locate(double t) const {
    const double now = current_time();
    const double slack = 1e-9 * dt_;
    if (t < -horizon_ - slack)
        throw InvalidArgument("history lookup at t=" + std::to_string(t) + " precedes -horizon");
    if (t > now + slack)
        throw InvalidArgument("history lookup at t=" + std::to_string(t) + " is in the future");
    if (t < 0.0 && t < -slack) return {true, 0, 0.0};
    double x = std::max(t, 0.0) / dt_;
    double lo = std::floor(x);
    double frac = x - lo;
    if (frac > 1.0 - 1e-9) {
        lo += 1.0;
        frac = 0.0;
    } else if (frac < 1e-9) {
        frac = 0.0;
    }
    auto n = static_cast<std::size_t>(lo);
    if (n > steps_) n = steps_, frac = 0.0;
    if (steps_ + 1 > capacity_ && n < steps_ + 1 - capacity_)
        throw InvalidArgument("history lookup at t=" + std::to_string(t) + " left the retained window");
    return {false, n, frac};
}

double HistoryBuffer::lookup(std::size_t channel, double t) const {
    const Bracket b = locate(t);
    if (b.before_zero) return initial_(channel, t);
    const double a = row(b.lo)[channel];
    if (b.frac == 0.0) return a;
    return a + b.frac * (row(b.lo + 1)[channel] - a);
}

void HistoryBuffer::lookup_row(double t, std::span<double> out) const {
    const Bracket b = locate(t);
    if (b.before_zero) {
        for (std::size_t c = 0; c < width_; ++c) out[c] = initial_(c, t);
        return;
    }
    const auto a = row(b.lo);
    if (b.frac == 0.0) {
        std::copy(a.begin(), a.end(), out.begin());
        return;
    }
    const auto next = row(b.lo + 1);
    for (std::size_t c = 0; c < width_; ++c) out[c] = a[c] + b.frac * (next[c] - a[c]);
}

} // namespace nf
