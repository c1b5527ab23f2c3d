#pragma once

#include <stdexcept>
#include <string>

namespace idtraj {

// Bad user-supplied values: malformed CSV rows, non-positive volumes, ...
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inconsistent or invalid configuration (missing keys, impossible ranges).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dataset-level problems: missing products, schema mismatch, broken store.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Statistically degenerate fit input (zero variance, too few rows, one-class
// labels) where no estimate exists.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver exhausted its budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated API precondition detected at runtime.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace idtraj
