#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixlogit/diagnostics.hpp"
#include "mixlogit/divergence.hpp"
#include "mixlogit/hierarchy.hpp"
#include "mixlogit/model.hpp"

namespace mixlogit {

struct MhConfig {
  std::int64_t n_iter = 20000;
  std::int64_t n_burn = 10000;
  std::int64_t thin = 1;
  double target_accept = 0.23;
  double rho_beta = 0.1;
  double rho_alpha = 0.1;
  std::int64_t adapt_every = 100;
  double adapt_factor = 1.1;
  std::uint64_t seed = 1;
  std::uint64_t chain = 0;
  int threads = 1;
  ZetaUpdate zeta_update = ZetaUpdate::kConjugate;
  /// Fit alternative-specific coefficients by expanding the design
  /// (see expand_alternative_specific) before sampling.
  bool expand_alternative_specific = false;
  bool store_beta = false;
  DivergenceThresholds divergence;
  Mutation mutation = Mutation::kNone;

  void validate() const;
};

/// Result of a full sampler run. On divergence the chain holds whatever was
/// stored before the monitor fired.
struct RunResult {
  Chain chain;
  DivergenceReport divergence;
  double seconds = 0.0;
};

/// Initial state: alpha = lambda0, zeta = mu0, Omega = I, a_k = 1/A_k^2 and
/// beta_n = mu0 + N(0, I). Identical starting tastes make the first Omega
/// draw collapse toward zero, which the Omega-scaled random walk then
/// cannot escape.
GenericParamState initial_generic_state(const ChoiceDataset& data, const HyperParameters& hyper,
                                        std::uint64_t seed, std::uint64_t chain);

// Conditional updates. Streams are owned by the caller.
Eigen::VectorXd update_a(const GenericParamState& state, const HyperParameters& hyper,
                         RngStream& stream, Mutation mutation = Mutation::kNone);
/// Omega ~ IW(nu + N + K - 1, 2 nu diag(a) + sum_n (beta_n - zeta)(beta_n - zeta)^T).
PdMatrix update_omega_generic(const GenericParamState& state, const HyperParameters& hyper,
                              RngStream& stream, Mutation mutation = Mutation::kNone);
Eigen::VectorXd update_zeta_generic(const GenericParamState& state, const HyperParameters& hyper,
                                    ZetaUpdate form, RngStream& stream,
                                    Mutation mutation = Mutation::kNone);

/// Metropolis-within-Gibbs sampler for the generic MNL / MMNL model.
///
/// One sweep updates (a, Omega, zeta, beta_1..N, alpha) in that order.
/// beta_n moves are block random walks beta + rho_beta * chol(Omega) * eps,
/// alpha moves are alpha + rho_alpha * chol(Xi0) * eps. Each beta_n uses its
/// own stream keyed by (iteration, n), so the beta sweep gives identical
/// results for any thread count.
class MhSampler {
 public:
  MhSampler(ChoiceDataset data, HyperParameters hyper, MhConfig config);

  /// One full sweep with the current step sizes. Does not adapt.
  void sweep(std::int64_t iteration);
  /// Burn-in step-size adaptation from the acceptance over the last window.
  void adapt(double beta_rate, double alpha_rate);

  const GenericParamState& state() const noexcept { return state_; }
  void set_state(GenericParamState state);
  const ChoiceDataset& data() const noexcept { return data_; }
  /// Replace the observed choices (Geweke successive-conditional simulation).
  void set_choices(const std::vector<int>& y);

  double rho_beta() const noexcept { return rho_beta_; }
  double rho_alpha() const noexcept { return rho_alpha_; }
  std::int64_t last_beta_accepts() const noexcept { return last_beta_accepts_; }
  std::int64_t last_alpha_accepts() const noexcept { return last_alpha_accepts_; }

  UtilityTensor utilities() const;
  double log_likelihood() const;

  /// Random-walk beta sweep over all individuals; returns the accept count.
  std::int64_t mh_update_beta(std::int64_t iteration);
  /// Single-block random-walk alpha update; returns 0 or 1.
  std::int64_t mh_update_alpha(std::int64_t iteration);

 private:
  void rebuild_caches();
  double individual_log_likelihood(int n, const Eigen::VectorXd& beta) const;

  ChoiceDataset data_;
  HyperParameters hyper_;
  MhConfig config_;
  GenericParamState state_;
  PdMatrix xi0_;
  double rho_beta_;
  double rho_alpha_;
  UtilityTensor fixed_part_;   // X_F alpha
  UtilityTensor random_part_;  // X_R beta_n
  std::vector<double> loglik_;
  std::int64_t last_beta_accepts_ = 0;
  std::int64_t last_alpha_accepts_ = 0;
};

/// Parameter names in chain order: alpha[l], zeta[k], omega[k1][k2] (k1 <= k2),
/// a[k], then beta[n][k] when requested. Indices are 1-based.
std::vector<std::string> generic_param_names(int L, int K, int N, bool with_beta);
std::vector<double> flatten(const GenericParamState& s, bool with_beta);
double max_abs_parameter(const GenericParamState& s);

RunResult run_mh(const ChoiceDataset& data, const HyperParameters& hyper, const MhConfig& config);

}  // namespace mixlogit
