// Exception types. The CLI maps each family onto an exit code.

#pragma once

#include <stdexcept>
#include <string>

namespace ssblab {

// Shape or size mismatch between an operator and the space it acts on.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Violated precondition on an argument value (empty region, off-grid momentum, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A matrix that must be positive semidefinite is not (kernels, g, rho).
class PositivityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature, time grid or integrator failed its refinement check.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssblab
