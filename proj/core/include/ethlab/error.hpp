#pragma once

#include <stdexcept>
#include <string>

namespace ethlab {

/// Input outside the mathematical domain of an operation (real z, J too large, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed arguments: dimension mismatch, bad enum name, inconsistent spec.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A deterministic formula hit a vanishing stability factor.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file problems (unknown keys, wrong types). Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ethlab
