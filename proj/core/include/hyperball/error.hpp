#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace hyperball {

/// Machine-readable failure category. The CLI maps each category to a
/// distinct exit code.
enum class ErrorCategory {
  kDomain,       // parameter outside its admissible range
  kDimension,    // mismatched vector dimensions
  kBoundary,     // point on or numerically too close to the unit sphere
  kConvergence,  // iteration cap reached
  kNumerical,    // overflow/underflow/non-finite intermediate
  kCollapse,     // mixture component lost all its mass
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::kDomain, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorCategory::kDimension, what) {}
};

class BoundaryError : public Error {
 public:
  explicit BoundaryError(const std::string& what)
      : Error(ErrorCategory::kBoundary, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

class CollapseError : public Error {
 public:
  CollapseError(const std::string& what, int restarts)
      : Error(ErrorCategory::kCollapse, what), restarts_(restarts) {}

  int restarts() const noexcept { return restarts_; }

 private:
  int restarts_;
};

/// Thrown by iterative solvers; carries the last iterate so callers can
/// inspect how far the solver got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                   double residual_norm)
      : Error(ErrorCategory::kConvergence, what),
        last_iterate_(std::move(last_iterate)),
        residual_norm_(residual_norm) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_norm_;
};

}  // namespace hyperball
