#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crossdiff {

/// Base class for all failures raised by the solvers and tooling.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative solver exceeded its iteration budget.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& phase, long step, int iterations)
      : Error(phase + ": no convergence after " + std::to_string(iterations) +
              " iterations (step " + std::to_string(step) + ")"),
        step_index(step), iterations_used(iterations) {}
  long step_index;
  int iterations_used;
};

/// The nonnegative least-squares iteration hit its cap.
class SolverFailureError : public Error {
public:
  using Error::Error;
};

/// A tridiagonal solve met a vanishing pivot.
class SingularSystemError : public Error {
public:
  using Error::Error;
};

/// Invalid argument to a constructor or operation.
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

/// Sampled data contains a negative value beyond the clamping band.
class NegativeInputError : public Error {
public:
  using Error::Error;
};

/// Two grid functions do not share a grid.
class GridMismatchError : public Error {
public:
  using Error::Error;
};

/// Configuration text could not be parsed.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int column)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + msg),
        line(line), column(column) {}
  int line;
  int column;
};

/// A parsed configuration violates one or more invariants.
class ValidationError : public Error {
public:
  ValidationError(const std::string& msg, std::vector<std::string> bad_fields)
      : Error(msg), fields(std::move(bad_fields)) {}
  std::vector<std::string> fields;
};

/// Filesystem failure while emitting run artifacts.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace crossdiff
