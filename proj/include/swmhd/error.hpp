#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swmhd {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scenario, mesh or parameter values. The message carries the
/// offending key path when the error originates from a config file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A pointwise formula hit a vanishing or non-finite denominator.
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

/// Singular tridiagonal system (zero forward-elimination pivot).
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& what, std::size_t row)
        : Error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A time step could not be completed.
class StepFailure : public Error {
public:
    enum class Kind { non_convergence, invariant_violation, degenerate };

    StepFailure(Kind kind, long step, std::size_t node, const std::string& what)
        : Error(what), kind_(kind), step_(step), node_(node) {}

    Kind kind() const noexcept { return kind_; }
    /// Index of the layer that was being computed.
    long step() const noexcept { return step_; }
    /// Worst offending node or cell.
    std::size_t node() const noexcept { return node_; }

private:
    Kind kind_;
    long step_;
    std::size_t node_;
};

inline const char* to_string(StepFailure::Kind kind)
{
    switch (kind) {
    case StepFailure::Kind::non_convergence: return "non_convergence";
    case StepFailure::Kind::invariant_violation: return "invariant_violation";
    case StepFailure::Kind::degenerate: return "degenerate";
    }
    return "unknown";
}

} // namespace swmhd
