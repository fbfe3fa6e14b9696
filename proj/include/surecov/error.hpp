#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace surecov {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or estimator parameter lies outside its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Fewer observations than a formula requires (n >= 3 or n >= 4).
class SampleSizeError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// A custom weight table violates the tapering weight conditions.
class InvalidWeightError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A brute-force routine was asked for more work than its cap allows.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or command-line configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace surecov
