#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Invalid input: bad domain, inadmissible exponent, malformed config.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to reach its tolerance. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (r outside (0,1), negative field, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace fraclab
