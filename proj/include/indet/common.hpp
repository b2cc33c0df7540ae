#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace indet {

using cplx = std::complex<double>;

enum class Precision { standard, extended };

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coefficient index lies beyond explicit data without a tail rule.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Recurrence values left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A series did not settle before the hard truncation cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a mathematical precondition (basepoint, support point,
/// zero on a contour, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two basepoints gave different membership verdicts.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Carries the 1-based line or 0-based column.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace indet
