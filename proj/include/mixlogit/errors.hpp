#pragma once

#include <stdexcept>
#include <string>

namespace mixlogit {

/// Thrown when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a sampler finds its own state unusable (e.g. a non-finite
/// log-likelihood at the current point).
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization failed even after the jitter policy was exhausted.
class NumericalPdError : public std::runtime_error {
 public:
  NumericalPdError(std::string stage, double min_diagonal)
      : std::runtime_error("matrix not positive definite at stage '" + stage +
                           "' (min diagonal " + std::to_string(min_diagonal) + ")"),
        stage_(std::move(stage)),
        min_diagonal_(min_diagonal) {}

  const std::string& stage() const noexcept { return stage_; }
  double min_diagonal() const noexcept { return min_diagonal_; }

 private:
  std::string stage_;
  double min_diagonal_;
};

}  // namespace mixlogit
