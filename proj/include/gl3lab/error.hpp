#pragma once

#include <stdexcept>
#include <string>

namespace gl3lab {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kSuccess = 0,
  kValidation = 2,
  kResource = 3,
  kNumeric = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kNumeric; }
};

// Argument outside the mathematical domain of an operation (e.g. an index
// that is not cube-free).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Query point beyond what a table or series supports.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Input sequence too short for the requested construction.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Floating-point overflow or other numeric breakdown.
class NumericError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kValidation; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kValidation; }
};

// Allocation or enumeration size beyond the configured budget.
class ResourceError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kResource; }
};

}  // namespace gl3lab
