#pragma once

#include <stdexcept>
#include <string>

namespace scal {

/// Invalid argument to a library operation (bad sizes, out-of-range values).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed or unreadable input file (CSV, IDX, binary dumps).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Input is numerically degenerate (zero bandwidth, nonpositive degrees, ...).
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed (divergence, no convergence).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem size exceeds what the exact solver is configured to handle.
class ScaleError : public std::runtime_error {
public:
    explicit ScaleError(const std::string& what) : std::runtime_error(what) {}
};

/// Wraps a failure inside a pipeline run with the name of the failing stage.
class PipelineError : public std::runtime_error {
public:
    PipelineError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "': " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

} // namespace scal
