#pragma once

#include <stdexcept>
#include <string>

namespace chirpwave {

// Error hierarchy. The CLI maps ConfigError/DimensionError/PayloadError to
// exit status 2 and NumericalError/UndefinedMetricError to 3.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter or parameter combination. The message names the field.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix sizes that do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Bit payload of the wrong size for the waveform.
class PayloadError : public Error {
public:
    using Error::Error;
};

/// Singular systems, budget overruns and other numerical refusals.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Metric undefined for the input (zero power, empty map).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

}  // namespace chirpwave
