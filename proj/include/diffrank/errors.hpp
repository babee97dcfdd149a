#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diffrank {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed edge-list, delta, zap or state text. Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Node id outside [0, n).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A graph delta that does not apply to the graph it is given.
class DeltaError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver parameters (damping, default distribution, labels...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// di_update called with a changed-column set that does not match the graphs.
class UpdateError : public Error {
 public:
  using Error::Error;
};

/// Internal state no longer satisfies the accounting invariants.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// The dense oracle refuses systems above its size guard.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace diffrank
