#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dnls {

/// Precondition or argument violation raised by the library.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time stepper produced non-finite coefficients.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Picard iteration failed to reach its tolerance within the iteration budget.
class NoContraction : public std::runtime_error {
 public:
  NoContraction(const std::string& what, std::size_t iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

/// Configuration document could not be parsed or validated. `path()` is the
/// offending key path, e.g. "u0.center", or empty for document-level errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace dnls
