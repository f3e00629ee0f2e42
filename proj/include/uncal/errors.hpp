#pragma once

#include <stdexcept>
#include <string>

namespace uncal {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric or value outside its documented domain (confidence not in [0,1], bad label, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Bad run configuration: missing splits, sizing shortfalls, unknown modes.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed input file; message carries the line number where applicable.
struct ParseError : Error {
    using Error::Error;
};

/// Transport or capability failure of a model backend, after retries.
struct BackendError : Error {
    using Error::Error;
};

/// Unknown linguistic expression.
struct LookupError : Error {
    using Error::Error;
};

/// Isotonic fit preconditions violated.
struct FitError : Error {
    using Error::Error;
};

}  // namespace uncal
