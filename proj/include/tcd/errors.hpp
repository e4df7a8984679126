#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcd {

/// A violated precondition of the physical or discrete problem (bad input).
class InvalidSetup : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Any failure of a numerical procedure on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public NumericalError {
public:
  NotPositiveDefinite(std::size_t pivot, const std::string &what)
      : NumericalError("matrix not positive definite at pivot " +
                       std::to_string(pivot) + ": " + what),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

private:
  std::size_t pivot_;
};

class SingularMatrix : public NumericalError {
public:
  SingularMatrix(std::size_t pivot)
      : NumericalError("zero pivot at row " + std::to_string(pivot)),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

private:
  std::size_t pivot_;
};

class NoConvergence : public NumericalError {
public:
  NoConvergence(const std::string &what, double last_residual)
      : NumericalError(what + " (last residual " +
                       std::to_string(last_residual) + ")"),
        residual_(last_residual) {}
  double last_residual() const noexcept { return residual_; }

private:
  double residual_;
};

class RankDeficient : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Raised when the eigenvalue shift leaves the radius of the denominator
/// expansion; callers may re-freeze the denominators and retry.
class ExpansionOutOfRadius : public NumericalError {
public:
  ExpansionOutOfRadius(const std::string &what, double current_eps)
      : NumericalError(what), current_eps_(current_eps) {}
  double current_epsilon() const noexcept { return current_eps_; }

private:
  double current_eps_;
};

} // namespace tcd
