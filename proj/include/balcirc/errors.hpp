#pragma once

#include <stdexcept>
#include <string>

namespace balcirc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid specs, out-of-range arguments, malformed inputs.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// File-system failures, always carrying the offending path in the message.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Iterative numerics that failed to converge. Carries the last iterate
/// and residual so callers can decide whether the partial answer is usable.
class NumericError : public Error {
public:
    NumericError(const std::string& msg, double last_iterate, double residual)
        : Error(msg), last_iterate(last_iterate), residual(residual) {}

    double last_iterate;
    double residual;
};

} // namespace balcirc
