#pragma once

#include <stdexcept>
#include <string>

namespace kerrcat {

/// Invalid user input: bad config values, malformed files, violated preconditions.
/// The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure could not produce a trustworthy result.
/// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateGapError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class PlannerStuckError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IntegratorError : public NumericalError {
public:
    IntegratorError(const std::string& what, double time)
        : NumericalError(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

class GridTooSmallError : public NumericalError {
public:
    GridTooSmallError(const std::string& what, double suggested_half_width)
        : NumericalError(what), suggested_half_width_(suggested_half_width) {}
    double suggested_half_width() const { return suggested_half_width_; }

private:
    double suggested_half_width_;
};

class LobeDetectionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace kerrcat
