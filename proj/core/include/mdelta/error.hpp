#pragma once

#include <stdexcept>
#include <string>

namespace mdelta {

// Caller violated an operation's precondition (short past, bad parameter, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative numeric routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Exhaustive enumeration refused because n exceeds the configured cap.
class EnumerationCapError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// A bitstream failed validation while decoding.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A generator could not satisfy its post-condition.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdelta
