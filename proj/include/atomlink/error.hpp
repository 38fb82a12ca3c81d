#pragma once

#include <stdexcept>
#include <string>

namespace atomlink {

/// A physical or numerical argument is outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A closed-form expression hit a vanishing denominator.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A least-squares fit could not be set up or did not converge.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration document is malformed; the message carries the key path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ParameterError(std::string(what) + " must lie in [0,1], got " + std::to_string(p));
    }
}

inline void require_non_negative(double v, const char* what) {
    if (!(v >= 0.0)) {
        throw ParameterError(std::string(what) + " must be >= 0, got " + std::to_string(v));
    }
}

} // namespace detail
} // namespace atomlink
