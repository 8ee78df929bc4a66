#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dowave {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid or quadrature sizes outside their admissible range.
class InvalidDiscretization : public Error {
public:
    using Error::Error;
};

/// Problem data violating a model invariant (non-positive weight, bad domain, incompatible data).
class InvalidProblem : public Error {
public:
    using Error::Error;
};

/// A zero pivot in the tridiagonal or dense elimination.
class SingularSystem : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Convergence order requested from a non-positive error.
class UndefinedOrder : public Error {
public:
    using Error::Error;
};

/// Reference solver asked for a problem above its size guard.
class OracleTooLarge : public Error {
public:
    using Error::Error;
};

/// Adaptive reference quadrature hit its refinement cap.
class OracleFailure : public Error {
public:
    using Error::Error;
};

/// Wraps a failure raised while advancing to time level `step`.
class StepFailure : public Error {
public:
    StepFailure(std::size_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace dowave
