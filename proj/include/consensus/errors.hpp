#pragma once

#include <stdexcept>
#include <string>

namespace consensus {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A data-model invariant does not hold. The message names the invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside its admissible range.
class RangeError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

/// Precondition on an argument violated by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Left null-space solve produced a residual above tolerance.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Left null eigenvector has a non-positive entry.
class NonPositive : public Error {
 public:
  using Error::Error;
};

/// Charnes-Cooper scale variable ended at its floor.
class DegenerateTau : public Error {
 public:
  using Error::Error;
};

/// Linear program did not reach an optimal vertex.
class LpFailure : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed its configured cap.
class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace consensus
