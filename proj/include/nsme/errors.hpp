#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsme {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or index mismatch between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to reach its accuracy target, or a
/// constructed object violated an internal consistency check.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied parameters.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Raised by the spectral propagator when the Liouvillian eigenbasis is too
/// ill-conditioned; callers reroute to the RK4 integrator.
class FallbackRequired : public NumericalError {
public:
    FallbackRequired(const std::string& message, double condition)
        : NumericalError(message), condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

}  // namespace nsme
