#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcmsdp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument values or violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes that do not agree.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Raised for the all-zero cost matrix where a norm-scaled quantity is
/// undefined; every feasible point is optimal in that case.
class TrivialInstanceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Input text that does not parse. Carries the 1-based line number.
class ParseError : public IoError {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : IoError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcmsdp
