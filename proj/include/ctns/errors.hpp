#pragma once

#include <stdexcept>
#include <string>

namespace ctns {

/// Bad or inconsistent configuration (unknown keys, out-of-range values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure inside a solver kernel (non-convergence, stiffness,
/// positivity loss beyond tolerance).
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A diagnostic precondition was violated (non-finite field, value below floor).
struct DiagnosticError : std::runtime_error {
    explicit DiagnosticError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ctns
