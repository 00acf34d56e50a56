#pragma once

#include <stdexcept>
#include <string>

namespace nf {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag that the CLI copies into its error record.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

/// A simulated state became non-finite.
class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double time, std::size_t index)
        : Error("blow_up", what), time_(time), index_(index) {}

    double time() const noexcept { return time_; }
    std::size_t index() const noexcept { return index_; }

private:
    double time_;
    std::size_t index_;
};

} // namespace nf
