#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace specluster {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A dense n x n construction was requested above the configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Some d_i + tau vanished, so D_tau^{-1/2} does not exist.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The block model (or its estimate) has no usable eigen gap.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

/// Parameters violate the structural assumptions of a closed form.
class ModelViolationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  /// Best residual estimates reached before giving up.
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace specluster
