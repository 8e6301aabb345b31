#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixlogit/rng.hpp"

namespace mixlogit {

/// Balanced panel of N decision-makers, T occasions and J alternatives.
/// Covariates are split into a fixed-coefficient block (L columns) and a
/// random-coefficient block (K columns). Choices are 0-based internally;
/// files use 1-based alternative labels.
struct ChoiceDataset {
  int N = 0;
  int T = 0;
  int J = 0;
  int L = 0;
  int K = 0;
  std::vector<double> xf;  // [((n*T + t)*J + j)*L + l]
  std::vector<double> xr;  // [((n*T + t)*J + j)*K + k]
  std::vector<int> y;      // [n*T + t], in [0, J)

  static ChoiceDataset zeros(int N, int T, int J, int L, int K);

  std::size_t obs(int n, int t) const noexcept {
    return static_cast<std::size_t>(n) * T + t;
  }
  std::size_t cell(int n, int t, int j) const noexcept { return obs(n, t) * J + j; }

  Eigen::Map<const Eigen::VectorXd> fixed_row(int n, int t, int j) const {
    return {xf.data() + cell(n, t, j) * L, L};
  }
  Eigen::Map<const Eigen::VectorXd> random_row(int n, int t, int j) const {
    return {xr.data() + cell(n, t, j) * K, K};
  }
  double& fixed_at(int n, int t, int j, int l) { return xf[cell(n, t, j) * L + l]; }
  double& random_at(int n, int t, int j, int k) { return xr[cell(n, t, j) * K + k]; }
  int choice(int n, int t) const noexcept { return y[obs(n, t)]; }

  /// Throws InvalidInput when sizes, finiteness or choice ranges are off.
  void validate() const;
  /// FNV-1a digest over dimensions, covariates and choices.
  std::string digest() const;

  bool operator==(const ChoiceDataset&) const = default;
};

/// Prior hyper-parameters. The a_k prior is Gamma(1/2, rate 1/A_k^2) and the
/// covariance prior is IW(nu + K - 1, 2 nu diag(a)).
struct HyperParameters {
  Eigen::VectorXd lambda0;  // prior mean of alpha (L)
  Eigen::MatrixXd xi0;      // prior covariance of alpha (L x L)
  Eigen::VectorXd mu0;      // prior mean of zeta (K)
  Eigen::MatrixXd sigma0;   // prior covariance of zeta (K x K)
  double nu = 2.0;
  Eigen::VectorXd A;        // half-t scales (K)

  /// nu = 2, A_k = 1e3, zero means, 10 * I covariances.
  static HyperParameters defaults(int L, int K);
  void validate(int L, int K) const;

  double a_prior_shape() const noexcept { return 0.5; }
  double a_prior_rate(int k) const { return 1.0 / (A(k) * A(k)); }
  double omega_prior_df() const noexcept { return nu + static_cast<double>(A.size()) - 1.0; }
  Eigen::MatrixXd omega_prior_scale(const Eigen::VectorXd& a) const {
    return (2.0 * nu * a).asDiagonal();
  }
};

/// Parameters of the model with generic (shared across alternatives) tastes.
struct GenericParamState {
  Eigen::VectorXd alpha;  // L
  Eigen::VectorXd zeta;   // K
  Eigen::MatrixXd omega;  // K x K
  Eigen::VectorXd a;      // K
  Eigen::MatrixXd beta;   // N x K
};

/// Parameters of the alternative-specific model plus the Polya-Gamma
/// auxiliaries.
struct AltSpecificParamState {
  Eigen::MatrixXd alpha;              // J x L
  Eigen::MatrixXd zeta;               // J x K
  Eigen::MatrixXd omega;              // K x K
  Eigen::VectorXd a;                  // K
  std::vector<Eigen::MatrixXd> beta;  // J entries of N x K
  std::vector<Eigen::MatrixXd> phi;   // J entries of N x T
};

/// N x T x J tensor of representative utilities.
struct UtilityTensor {
  int N = 0;
  int T = 0;
  int J = 0;
  std::vector<double> values;

  UtilityTensor() = default;
  UtilityTensor(int n, int t, int j)
      : N(n), T(t), J(j), values(static_cast<std::size_t>(n) * t * j, 0.0) {}

  double& operator()(int n, int t, int j) { return values[index(n, t, j)]; }
  double operator()(int n, int t, int j) const { return values[index(n, t, j)]; }
  std::span<const double> row(int n, int t) const {
    return {values.data() + index(n, t, 0), static_cast<std::size_t>(J)};
  }
  std::size_t index(int n, int t, int j) const noexcept {
    return (static_cast<std::size_t>(n) * T + t) * J + j;
  }
};

UtilityTensor representative_utility(const ChoiceDataset& data, const GenericParamState& params);
UtilityTensor representative_utility(const ChoiceDataset& data,
                                     const AltSpecificParamState& params);

/// log sum_j exp(v_j) with max subtraction.
double log_sum_exp(std::span<const double> v);
/// log sum_{k != skip} exp(v_k). The excluded term is never added in.
double log_sum_exp_excluding(std::span<const double> v, std::size_t skip);

/// Softmax with max subtraction. Rejects non-finite input.
Eigen::VectorXd mnl_probabilities(std::span<const double> v);

double sequence_log_likelihood(const ChoiceDataset& data, const UtilityTensor& v, int n);
double sequence_log_likelihood(const ChoiceDataset& data, const GenericParamState& params, int n);
double total_log_likelihood(const ChoiceDataset& data, const UtilityTensor& v);

/// Holmes-Held quantities for alternative j:
/// L_ntj = log sum_{k != j} exp(V_ntk), eta_ntj = V_ntj - L_ntj.
struct LogitReduction {
  Eigen::MatrixXd L;    // N x T
  Eigen::MatrixXd eta;  // N x T
};
LogitReduction compute_L_eta(const UtilityTensor& v, int j);

/// y - 1/2 for a 0/1 choice indicator.
double kappa(int y_indicator);

/// Monte Carlo check of the Polya-Gamma integral identity
/// e^{eta y} / (1 + e^eta) = e^{kappa eta} / 2 * E[exp(-eta^2 w / 2)], w ~ PG(1, 0).
struct PgIdentityCheck {
  double lhs = 0.0;
  double rhs_estimate = 0.0;
  double std_error = 0.0;
};
PgIdentityCheck pg_identity_check(double eta, int y, std::int64_t n_draws, RngStream& stream);

/// Rewrites alternative-specific fixed/random coefficients as a generic
/// design with L*J and K*J columns: alternative j's covariates occupy block j.
ChoiceDataset expand_alternative_specific(const ChoiceDataset& data);

double max_abs_utility(const UtilityTensor& v);
/// Mean over (n, t) of the model probability of the observed choice.
double mean_chosen_probability(const ChoiceDataset& data, const UtilityTensor& v);

}  // namespace mixlogit
