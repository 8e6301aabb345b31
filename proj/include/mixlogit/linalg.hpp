#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>

namespace mixlogit {

/// Symmetric positive-definite matrix together with its Cholesky factor.
///
/// Construction validates symmetry (1e-12 relative) and factorizes. When the
/// plain factorization fails, delta * mean(diag) * I is added with delta
/// starting at 1e-10 and growing tenfold, at most three escalations; after
/// that a NumericalPdError naming `stage` is raised. A dimension of zero is
/// accepted and represents "no random coefficients".
class PdMatrix {
 public:
  PdMatrix() = default;
  PdMatrix(const Eigen::MatrixXd& m, std::string_view stage);

  static PdMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  /// Lower factor of matrix() + jitter() * I.
  const Eigen::MatrixXd& lower() const noexcept { return lower_; }
  /// Diagonal shift that was needed to factorize (0 when none).
  double jitter() const noexcept { return jitter_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd inverse() const;
  double log_determinant() const;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd lower_;
  double jitter_ = 0.0;
};

/// Number of factorizations (process-wide) that needed jitter.
std::uint64_t jitter_event_count() noexcept;

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-12);

}  // namespace mixlogit
