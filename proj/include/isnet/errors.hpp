#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isnet {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario text (syntax, unknown keys, bad values).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  explicit ConfigError(const std::string& what) : ConfigError(what, 0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The traffic equations have no unique nonnegative solution.
class OpennessError : public Error {
 public:
  OpennessError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  /// Flattened (node, component) index of the offending entry.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Quadrature or linear algebra could not reach the requested accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace isnet
