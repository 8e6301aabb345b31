#include "mixlogit/linalg.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "mixlogit/errors.hpp"

namespace mixlogit {
namespace {

std::atomic<std::uint64_t> g_jitter_events{0};

constexpr double kJitterStart = 1e-10;
constexpr int kJitterEscalations = 3;

}  // namespace

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

PdMatrix::PdMatrix(const Eigen::MatrixXd& m, std::string_view stage) {
  if (m.rows() != m.cols()) {
    throw InvalidInput("PdMatrix: matrix is not square at stage '" + std::string(stage) + "'");
  }
  if (!is_symmetric(m)) {
    throw InvalidInput("PdMatrix: matrix is not symmetric at stage '" + std::string(stage) + "'");
  }
  matrix_ = 0.5 * (m + m.transpose());
  const Eigen::Index n = matrix_.rows();
  if (n == 0) return;

  Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
    lower_ = llt.matrixL();
    return;
  }

  const double mean_diag = matrix_.diagonal().mean();
  double delta = kJitterStart;
  for (int attempt = 0; attempt <= kJitterEscalations; ++attempt, delta *= 10.0) {
    const double shift = delta * std::abs(mean_diag);
    if (!(shift > 0.0) || !std::isfinite(shift)) break;
    llt.compute(matrix_ + shift * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      lower_ = llt.matrixL();
      if (!lower_.allFinite()) break;
      jitter_ = shift;
      g_jitter_events.fetch_add(1, std::memory_order_relaxed);
      return;
    }
  }
  throw NumericalPdError(std::string(stage), matrix_.diagonal().minCoeff());
}

PdMatrix PdMatrix::identity(Eigen::Index dim) {
  return PdMatrix(Eigen::MatrixXd::Identity(dim, dim), "identity");
}

Eigen::VectorXd PdMatrix::solve(const Eigen::VectorXd& rhs) const {
  const auto tri = lower_.triangularView<Eigen::Lower>();
  Eigen::VectorXd z = tri.solve(rhs);
  return tri.transpose().solve(z);
}

Eigen::MatrixXd PdMatrix::inverse() const {
  const Eigen::Index n = dim();
  const auto tri = lower_.triangularView<Eigen::Lower>();
  Eigen::MatrixXd linv = tri.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd inv = linv.transpose() * linv;
  return 0.5 * (inv + inv.transpose());
}

double PdMatrix::log_determinant() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

std::uint64_t jitter_event_count() noexcept {
  return g_jitter_events.load(std::memory_order_relaxed);
}

}  // namespace mixlogit
