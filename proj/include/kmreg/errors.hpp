#pragma once

#include <stdexcept>
#include <string>

namespace kmreg {

/// Invalid physical or numerical parameters (bad kmax, negative length, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates a convergence bound, e.g. gamma above 2 exp(lambda_min^2 T / a^2).
class ParameterBoundError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Operands that do not fit together (domain mismatch, length mismatch).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A spectral function evaluated to a non-finite value on some eigenvalue.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double lambda)
        : std::runtime_error(what), lambda_(lambda) {}

    double lambda() const noexcept { return lambda_; }

private:
    double lambda_;
};

/// sin(lambda T) too close to zero for the hyperbolic Dirichlet problem.
class ResonanceError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// Data carries energy on a mode where the problem has no solution.
class InconsistencyError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

}  // namespace kmreg
