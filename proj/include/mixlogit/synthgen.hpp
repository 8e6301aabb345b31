#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>

#include "mixlogit/model.hpp"

namespace mixlogit {

enum class ModelKind { kMnl, kMmnlGeneric, kMmnlAltSpecific };
enum class CovariateLaw { kNormal, kUniform, kReferenceZero, kSharedRandom };
/// How simulated choices are drawn from the utilities. Both give the MNL law.
enum class ChoiceRule { kCategorical, kGumbelMax };

std::string to_string(ModelKind kind);
std::string to_string(CovariateLaw law);
ModelKind parse_model_kind(const std::string& text);
CovariateLaw parse_covariate_law(const std::string& text);

/// A fixed-truth simulation design.
///
/// Shapes of the true values by model kind:
///   mnl              alpha J x L (alternative-specific), K = 0
///   mmnl-generic     alpha 1 x L, zeta 1 x K, omega K x K
///   mmnl-altspecific alpha J x L, zeta J x K, omega K x K
/// The reference-zero covariate law zeroes every covariate of the last
/// alternative and draws the rest iid standard normal. The shared-random law
/// draws x_R once per (n, t) and gives every alternative the same values
/// (individual-specific regressors); x_F stays iid normal per alternative.
struct ScenarioSpec {
  std::string name = "custom";
  ModelKind model_kind = ModelKind::kMnl;
  int N = 0;
  int T = 0;
  int J = 0;
  int L = 0;
  int K = 0;
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd zeta;
  Eigen::MatrixXd omega;
  CovariateLaw covariate_law = CovariateLaw::kNormal;
  std::uint64_t seed = 1;

  void validate() const;
  bool alternative_specific() const { return model_kind != ModelKind::kMmnlGeneric; }
};

/// The true parameters behind a generated dataset, including the drawn
/// individual tastes. `a` is left empty; it has no fixed truth.
using TrueParams = std::variant<GenericParamState, AltSpecificParamState>;

struct GeneratedData {
  ChoiceDataset dataset;
  TrueParams truth;
};

GeneratedData generate(const ScenarioSpec& spec, ChoiceRule rule = ChoiceRule::kCategorical);

/// Draws covariates only (choices all zero).
ChoiceDataset generate_covariates(int N, int T, int J, int L, int K, CovariateLaw law,
                                  std::uint64_t seed);

/// Redraws every choice from the MNL kernel for the given utilities.
void draw_choices(ChoiceDataset& data, const UtilityTensor& v, std::uint64_t seed,
                  std::uint64_t iteration, ChoiceRule rule = ChoiceRule::kCategorical);

/// Known presets: "mnl-j3", "mmnl-j2", "mmnl-j3".
ScenarioSpec preset(const std::string& name);

}  // namespace mixlogit
