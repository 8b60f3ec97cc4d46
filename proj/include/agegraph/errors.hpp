#pragma once

#include <stdexcept>
#include <string>

namespace agegraph {

// Error taxonomy shared by the library and the CLI. The CLI maps each
// category to a distinct exit code (see tools/).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape disagreement between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Argument outside its mathematical domain (negative age, alpha > 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Operation called in an invalid sequence (backward before forward, ...).
class StateError : public Error {
public:
    using Error::Error;
};

// NaN/Inf produced or encountered where finite values are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Bad configuration value or unknown key/variant.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed dataset or report file.
class IngestionError : public Error {
public:
    using Error::Error;
};

// Checkpoint does not match the configured model.
class CompatibilityError : public Error {
public:
    using Error::Error;
};

}  // namespace agegraph
