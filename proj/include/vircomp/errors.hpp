#pragma once

#include <stdexcept>
#include <string>

namespace vircomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or configuration value violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario document. Carries the offending line (1-based, 0 if unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// Base for failures of a numerical routine (mapped to exit status 2 by the CLI).
class SolverError : public Error {
public:
    using Error::Error;
};

class NewtonDivergence : public SolverError {
public:
    NewtonDivergence(int iterations, double residual)
        : SolverError("implicit step: Newton iteration failed after " + std::to_string(iterations) +
                      " iterations (residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}
    [[nodiscard]] int iterations() const noexcept { return iterations_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class NegativeStateOverflow : public SolverError {
public:
    NegativeStateOverflow(double time, double value)
        : SolverError("state component " + std::to_string(value) + " fell below the negative tolerance at t=" +
                      std::to_string(time)),
          time_(time), value_(value) {}
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    double time_;
    double value_;
};

class InsufficientResolution : public SolverError {
public:
    using SolverError::SolverError;
};

class NoDegenerateControl : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class InfeasibleStart : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace vircomp
