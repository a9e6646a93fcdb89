#pragma once

#include <stdexcept>
#include <string>

namespace photonn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// dt does not resolve the fastest rate of the model.
class StepSizeError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// The integrated state became non-finite.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time)
        : Error(what + " at t=" + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A broadcast loop would carry more channels than its weight banks can resolve.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Requested tuning cannot be realised with non-negative heater power.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Calibration measurements do not support the requested fit.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Missing or malformed input file.
class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace photonn
