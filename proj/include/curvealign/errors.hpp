#pragma once

#include <stdexcept>
#include <string>

namespace curvealign {

// Exception families map one-to-one onto CLI exit codes (1, 2, 3).

/// Invalid configuration or command-line usage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical computation left its representable range.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transform parameters produce a warp outside the representable range.
class ParameterRangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace curvealign
