#pragma once

#include <stdexcept>
#include <string>

namespace vqopt {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input (Pauli files, graph files). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Qubit counts, vector lengths or indices that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, Hermiticity violations, failed factorizations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The Sherman-Morrison filter hit a vanishing denominator or overflowed.
/// Callers may recover by recomputing the metric from scratch.
class FilterBreakdown : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vqopt
