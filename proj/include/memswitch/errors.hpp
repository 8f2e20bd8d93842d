#pragma once

#include <stdexcept>
#include <string>

namespace memswitch {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration (parameters, signals, presets).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A fit or parameter derivation has no admissible solution for its inputs.
class FitInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested drift would drive the conductance non-positive.
class DriftOutOfRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace memswitch
