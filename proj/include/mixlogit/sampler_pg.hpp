#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixlogit/diagnostics.hpp"
#include "mixlogit/divergence.hpp"
#include "mixlogit/hierarchy.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/sampler_mh.hpp"

namespace mixlogit {

/// When the Polya-Gamma auxiliaries of alternative i are drawn.
///   kPrinted:     at the end of block i, after the alpha_i update; they are
///                 consumed by block i of the next sweep.
///   kBeforeBlock: at the start of block i, from the current utilities.
enum class PhiSchedule { kPrinted, kBeforeBlock };

std::string to_string(PhiSchedule s);
PhiSchedule parse_phi_schedule(const std::string& text);

struct PgConfig {
  std::int64_t n_iter = 20000;
  std::int64_t n_burn = 10000;
  std::int64_t thin = 1;
  std::uint64_t seed = 1;
  std::uint64_t chain = 0;
  int threads = 1;
  DivergenceThresholds divergence;
  ZetaUpdate zeta_update = ZetaUpdate::kConjugate;
  PhiSchedule phi_schedule = PhiSchedule::kBeforeBlock;
  bool store_beta = false;
  /// Recompute V, L and eta from scratch after every refresh and require
  /// agreement with the incrementally maintained tensors.
  bool check_freshness = false;
  Mutation mutation = Mutation::kNone;

  void validate() const;
};

/// Working tensors: utilities and, for every alternative j,
/// L_ntj = log sum_{k != j} exp V_ntk and eta_ntj = V_ntj - L_ntj.
struct PgWorkspace {
  UtilityTensor v;
  UtilityTensor L;
  UtilityTensor eta;
};

PgWorkspace make_workspace(const ChoiceDataset& data, const AltSpecificParamState& state);

/// Gaussian full conditional in canonical form: N(P^-1 b, P^-1).
struct GaussianConditional {
  Eigen::MatrixXd precision;
  Eigen::VectorXd linear;
};

/// Initial state: alpha_j = lambda0, zeta_j = mu0, beta_nj = mu0 + N(0, I),
/// Omega = I, a_k = 1/A_k^2, phi ~ PG(1, 0).
AltSpecificParamState initial_alt_state(const ChoiceDataset& data, const HyperParameters& hyper,
                                        std::uint64_t seed, std::uint64_t chain);

Eigen::VectorXd update_a_pg(const AltSpecificParamState& state, const HyperParameters& hyper,
                            RngStream& stream, Mutation mutation = Mutation::kNone);
/// Omega ~ IW(nu + N J + K - 1, 2 nu diag(a) + sum_{n,j} (beta_nj - zeta_j)(...)^T).
PdMatrix update_omega_pg(const AltSpecificParamState& state, const HyperParameters& hyper,
                         RngStream& stream, Mutation mutation = Mutation::kNone);
Eigen::VectorXd update_zeta_pg(const AltSpecificParamState& state, int i,
                               const HyperParameters& hyper, ZetaUpdate form, RngStream& stream,
                               Mutation mutation = Mutation::kNone);

/// beta_ni | rest, phi:
///   precision  Omega^-1 + sum_t phi_nti x_R x_R^T
///   linear     Omega^-1 zeta_i + sum_t x_R (kappa_nti - phi_nti (x_F alpha_i - L_nti))
GaussianConditional beta_conditional_pg(const AltSpecificParamState& state,
                                        const ChoiceDataset& data, const PgWorkspace& ws,
                                        const Eigen::MatrixXd& omega_inverse, int n, int i,
                                        Mutation mutation = Mutation::kNone);
Eigen::VectorXd update_beta_pg(const AltSpecificParamState& state, const ChoiceDataset& data,
                               const PgWorkspace& ws, const Eigen::MatrixXd& omega_inverse, int n,
                               int i, RngStream& stream, Mutation mutation = Mutation::kNone);

/// alpha_i | rest, phi:
///   precision  Xi0^-1 + sum_{n,t} phi_nti x_F x_F^T
///   linear     Xi0^-1 lambda0 + sum_{n,t} x_F (kappa_nti - phi_nti (x_R beta_ni - L_nti))
GaussianConditional alpha_conditional_pg(const AltSpecificParamState& state,
                                         const ChoiceDataset& data, const PgWorkspace& ws,
                                         const HyperParameters& hyper, int i,
                                         Mutation mutation = Mutation::kNone);
Eigen::VectorXd update_alpha_pg(const AltSpecificParamState& state, const ChoiceDataset& data,
                                const PgWorkspace& ws, const HyperParameters& hyper, int i,
                                RngStream& stream, Mutation mutation = Mutation::kNone);

/// Recomputes V_{.,.,i} from the current parameters, then L and eta for every
/// alternative (each L_ntj with j != i depends on V_nti).
void refresh_eta_L(const ChoiceDataset& data, const AltSpecificParamState& state, int i,
                   PgWorkspace& ws);

/// phi_nti ~ PG(1, eta_nti) for all n, t; one stream per (i, n, t).
Eigen::MatrixXd update_phi(const PgWorkspace& ws, int i, std::uint64_t seed,
                           std::uint64_t iteration, std::uint64_t chain, int threads);

/// Polya-Gamma augmented Gibbs sampler for the alternative-specific model.
///
/// Sweep: a, Omega, then for each alternative i: zeta_i, beta_{.,i},
/// refresh, alpha_i, refresh, with phi_{.,.,i} placed per PhiSchedule.
/// With K = 0 only the alpha / phi cycle runs.
class PgSampler {
 public:
  PgSampler(ChoiceDataset data, HyperParameters hyper, PgConfig config);

  void sweep(std::int64_t iteration);

  const AltSpecificParamState& state() const noexcept { return state_; }
  void set_state(AltSpecificParamState state);
  const ChoiceDataset& data() const noexcept { return data_; }
  void set_choices(const std::vector<int>& y);
  const PgWorkspace& workspace() const noexcept { return ws_; }

 private:
  void refresh(int i);

  ChoiceDataset data_;
  HyperParameters hyper_;
  PgConfig config_;
  AltSpecificParamState state_;
  PgWorkspace ws_;
};

/// alpha[j][l], zeta[j][k], omega[k1][k2] (k1 <= k2), a[k], then
/// beta[n][j][k] when requested. Indices are 1-based.
std::vector<std::string> alt_param_names(int J, int L, int K, int N, bool with_beta);
std::vector<double> flatten(const AltSpecificParamState& s, bool with_beta);
double max_abs_parameter(const AltSpecificParamState& s);

RunResult run_pg(const ChoiceDataset& data, const HyperParameters& hyper, const PgConfig& config);

}  // namespace mixlogit
