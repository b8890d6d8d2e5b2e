#pragma once

#include <stdexcept>
#include <string>

namespace proxima {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A constructor or operation received a parameter outside its domain
// (non-positive radius, zero modulation height, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// An evaluation point lies outside the domain of a kernel (d <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation called on data that does not satisfy its precondition,
// e.g. histogramming a heightmap that was never shifted to contact.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Text input could not be parsed. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Quadrature did not converge, fit could not be carried out, etc.
class NumericError : public Error {
 public:
  using Error::Error;
};

class FitError : public NumericError {
 public:
  using NumericError::NumericError;
};

// No Taylor coefficient up to the probed order exceeds the tolerance.
class UnclassifiableError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace proxima
