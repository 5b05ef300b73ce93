#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace godm {

/// Base class for every error raised by the library. `kind()` is a short
/// machine-readable tag used by the CLI's error line.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

/// An iterative method hit its iteration cap. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, std::size_t iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  const char* kind() const noexcept override { return "convergence"; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

/// Something that the math guarantees cannot happen did happen
/// (singular factorization, NaN in an iterate).
class InternalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "internal"; }
};

struct MalformedLine {
  std::size_t line_number = 0;  // 1-based
  std::string content;
  std::string reason;
};

/// Raised when an edge list yields no usable records. The per-line report is
/// kept so callers can show the user what went wrong.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::vector<MalformedLine> malformed)
      : Error(what), malformed_(std::move(malformed)) {}
  const char* kind() const noexcept override { return "parse"; }
  const std::vector<MalformedLine>& malformed() const noexcept { return malformed_; }

 private:
  std::vector<MalformedLine> malformed_;
};

}  // namespace godm
