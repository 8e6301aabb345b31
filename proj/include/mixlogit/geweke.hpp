#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixlogit/hierarchy.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/sampler_pg.hpp"
#include "mixlogit/synthgen.hpp"

namespace mixlogit {

/// kMh: generic model, Metropolis-within-Gibbs transition.
/// kPg: alternative-specific model, Polya-Gamma transition.
/// kPrior: transition that redraws the parameters from the prior and ignores
/// the data; both Geweke simulators then coincide in law.
enum class SamplerKind { kMh, kPg, kPrior };

std::string to_string(SamplerKind k);
SamplerKind parse_sampler_kind(const std::string& text);

/// Toy design for the joint-distribution test. Limits: N <= 10, T <= 3,
/// 2 <= J <= 3, K <= 2.
struct GewekeToySpec {
  int N = 10;
  int T = 3;
  int J = 2;
  int L = 1;
  int K = 1;
  CovariateLaw covariate_law = CovariateLaw::kNormal;
  HyperParameters hyper;
  std::uint64_t seed = 11;
  /// Fixed random-walk scales for the MH transition (no adaptation).
  double rho_beta = 1.0;
  double rho_alpha = 1.0;
  ZetaUpdate zeta_update = ZetaUpdate::kConjugate;
  PhiSchedule phi_schedule = PhiSchedule::kBeforeBlock;
  /// When true the prior-kind model uses alternative-specific parameters.
  bool prior_alt_specific = false;

  /// Defaults: nu = 8, A_k = 1, zero means, identity prior covariances.
  static GewekeToySpec defaults(int N, int T, int J, int L, int K);
  void validate() const;
};

struct GewekeRow {
  std::string name;
  double mean_marginal = 0.0;
  double mean_successive = 0.0;
  double se_marginal = 0.0;
  double se_successive = 0.0;
  double z = 0.0;
};

struct GewekeResult {
  SamplerKind sampler = SamplerKind::kPrior;
  Mutation mutation = Mutation::kNone;
  std::int64_t n_outer = 0;
  std::vector<GewekeRow> rows;
  /// Set when the transition threw (e.g. a mutated update drove the chain
  /// to a non-PD matrix); every z is then infinite.
  std::string failure;

  double max_abs_z() const;
  bool passed(double threshold = 4.0) const { return failure.empty() && max_abs_z() < threshold; }
};

inline constexpr std::int64_t kMinGewekeOuter = 1000;

/// Marginal-conditional simulator (theta from the prior, then y | theta)
/// against the successive-conditional simulator (one transition of
/// theta | y, then a fresh y | theta), compared on first and second moments
/// of alpha and zeta, the Omega entries, a, the mean squared taste and the
/// share of alternative 1. z-scores use ESS-based standard errors for the
/// successive chain.
GewekeResult geweke_joint_test(SamplerKind sampler, const GewekeToySpec& spec,
                               std::int64_t n_outer, Mutation mutation = Mutation::kNone);

}  // namespace mixlogit
