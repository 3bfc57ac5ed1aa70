#pragma once

#include <stdexcept>
#include <string>

namespace trapdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A system violates the lossless identity beyond tolerance.
class NotLosslessError : public Error {
 public:
  using Error::Error;
};

/// An operation requires A_s(m) to be negative definite and it is not.
class NotNegativeDefiniteError : public Error {
 public:
  using Error::Error;
};

/// The requested ellipsoid collapses to a point (d(m) = 0).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Cross-checks between two numerical routes disagree.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::string status)
      : Error(what + " (solver status: " + status + ")"),
        status_(std::move(status)) {}

  const std::string& status() const { return status_; }

 private:
  std::string status_;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Refusal of a brute-force request whose cost would be unreasonable.
class TooExpensiveError : public Error {
 public:
  using Error::Error;
};

}  // namespace trapdyn
