#pragma once

#include <stdexcept>
#include <string>

namespace phaseslip {

// Invalid physical parameters, bad config keys, malformed input.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failures: solver non-convergence, unstable discretization,
// rejected integration steps.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class GridTooCoarseError : public NumericalError {
public:
    explicit GridTooCoarseError(const std::string& msg) : NumericalError(msg) {}
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& msg, double residual)
        : NumericalError(msg), achieved_residual(residual) {}
    double achieved_residual;
};

class StepRejectionError : public NumericalError {
public:
    explicit StepRejectionError(const std::string& msg) : NumericalError(msg) {}
};

class NoDoubleWellError : public NumericalError {
public:
    explicit NoDoubleWellError(const std::string& msg) : NumericalError(msg) {}
};

// Requested quantity is undefined at an exact degeneracy.
class DegeneracyError : public std::domain_error {
public:
    explicit DegeneracyError(const std::string& msg) : std::domain_error(msg) {}
};

} // namespace phaseslip
