#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sze {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The operation needs a connected graph (resistances, spectral gap).
class DisconnectedGraphError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Refinement cannot keep the partition equitable with |C0| < eps n.
class PartitionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace sze
