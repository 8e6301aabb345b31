#include "mixlogit/synthgen.hpp"

#include <cmath>
#include <vector>

#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"

namespace mixlogit {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMnl:
      return "mnl";
    case ModelKind::kMmnlGeneric:
      return "mmnl-generic";
    case ModelKind::kMmnlAltSpecific:
      return "mmnl-altspecific";
  }
  return "unknown";
}

std::string to_string(CovariateLaw law) {
  switch (law) {
    case CovariateLaw::kNormal:
      return "normal";
    case CovariateLaw::kUniform:
      return "uniform";
    case CovariateLaw::kReferenceZero:
      return "reference-zero";
    case CovariateLaw::kSharedRandom:
      return "shared-random";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "mnl") return ModelKind::kMnl;
  if (text == "mmnl-generic") return ModelKind::kMmnlGeneric;
  if (text == "mmnl-altspecific") return ModelKind::kMmnlAltSpecific;
  throw InvalidInput("unknown model kind '" + text + "'");
}

CovariateLaw parse_covariate_law(const std::string& text) {
  if (text == "normal") return CovariateLaw::kNormal;
  if (text == "uniform") return CovariateLaw::kUniform;
  if (text == "reference-zero") return CovariateLaw::kReferenceZero;
  if (text == "shared-random") return CovariateLaw::kSharedRandom;
  throw InvalidInput("unknown covariate law '" + text + "'");
}

void ScenarioSpec::validate() const {
  if (N <= 0 || T <= 0 || J < 2 || L < 0 || K < 0) {
    throw InvalidInput("ScenarioSpec: need N, T > 0, J >= 2, L, K >= 0");
  }
  const int alpha_rows = model_kind == ModelKind::kMmnlGeneric ? 1 : J;
  if (alpha.rows() != alpha_rows || alpha.cols() != L) {
    throw InvalidInput("ScenarioSpec: alpha must be " + std::to_string(alpha_rows) + " x " +
                       std::to_string(L));
  }
  if (model_kind == ModelKind::kMnl) {
    if (K != 0) throw InvalidInput("ScenarioSpec: mnl scenarios have K = 0");
    return;
  }
  if (K == 0) throw InvalidInput("ScenarioSpec: mixed scenarios need K > 0");
  const int zeta_rows = model_kind == ModelKind::kMmnlGeneric ? 1 : J;
  if (zeta.rows() != zeta_rows || zeta.cols() != K) {
    throw InvalidInput("ScenarioSpec: zeta must be " + std::to_string(zeta_rows) + " x " +
                       std::to_string(K));
  }
  if (omega.rows() != K || omega.cols() != K) {
    throw InvalidInput("ScenarioSpec: omega must be K x K");
  }
  // Throws if omega is not PD.
  PdMatrix check(omega, "scenario_omega");
  if (!alpha.allFinite() || !zeta.allFinite()) {
    throw InvalidInput("ScenarioSpec: true values must be finite");
  }
}

ChoiceDataset generate_covariates(int N, int T, int J, int L, int K, CovariateLaw law,
                                  std::uint64_t seed) {
  ChoiceDataset data = ChoiceDataset::zeros(N, T, J, L, K);
  for (int n = 0; n < N; ++n) {
    RngStream stream(seed, {Purpose::kCovariates, 0, 0, static_cast<std::uint64_t>(n)});
    auto draw = [&]() {
      return law == CovariateLaw::kUniform ? 2.0 * stream.uniform() - 1.0 : stream.normal();
    };
    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < J; ++j) {
        const bool zeroed = law == CovariateLaw::kReferenceZero && j == J - 1;
        for (int l = 0; l < L; ++l) data.fixed_at(n, t, j, l) = zeroed ? 0.0 : draw();
        const bool shared = law == CovariateLaw::kSharedRandom && j > 0;
        for (int k = 0; k < K; ++k) {
          data.random_at(n, t, j, k) =
              zeroed ? 0.0 : shared ? data.random_at(n, t, 0, k) : draw();
        }
      }
    }
  }
  return data;
}

void draw_choices(ChoiceDataset& data, const UtilityTensor& v, std::uint64_t seed,
                  std::uint64_t iteration, ChoiceRule rule) {
  std::vector<double> noisy(static_cast<std::size_t>(data.J));
  for (int n = 0; n < data.N; ++n) {
    RngStream stream(seed, {Purpose::kChoices, iteration, 0, static_cast<std::uint64_t>(n)});
    for (int t = 0; t < data.T; ++t) {
      const auto row = v.row(n, t);
      if (rule == ChoiceRule::kCategorical) {
        const Eigen::VectorXd p = mnl_probabilities(row);
        data.y[data.obs(n, t)] = static_cast<int>(
            sample_categorical(std::span<const double>(p.data(), p.size()), stream));
      } else {
        int best = 0;
        for (int j = 0; j < data.J; ++j) {
          noisy[static_cast<std::size_t>(j)] = row[static_cast<std::size_t>(j)] +
                                               sample_gumbel(stream);
          if (noisy[static_cast<std::size_t>(j)] > noisy[static_cast<std::size_t>(best)]) best = j;
        }
        data.y[data.obs(n, t)] = best;
      }
    }
  }
}

GeneratedData generate(const ScenarioSpec& spec, ChoiceRule rule) {
  spec.validate();
  ChoiceDataset data =
      generate_covariates(spec.N, spec.T, spec.J, spec.L, spec.K, spec.covariate_law, spec.seed);

  auto taste_stream = [&](int n) {
    return RngStream(spec.seed, {Purpose::kTruth, 0, 0, static_cast<std::uint64_t>(n)});
  };

  if (spec.model_kind == ModelKind::kMmnlGeneric) {
    GenericParamState truth;
    truth.alpha = spec.alpha.row(0).transpose();
    truth.zeta = spec.zeta.row(0).transpose();
    truth.omega = spec.omega;
    truth.beta = Eigen::MatrixXd(spec.N, spec.K);
    const PdMatrix omega(spec.omega, "scenario_omega");
    for (int n = 0; n < spec.N; ++n) {
      RngStream stream = taste_stream(n);
      truth.beta.row(n) = sample_mvn_cov(truth.zeta, omega, stream).transpose();
    }
    draw_choices(data, representative_utility(data, truth), spec.seed, 0, rule);
    return {std::move(data), std::move(truth)};
  }

  AltSpecificParamState truth;
  truth.alpha = spec.alpha;
  truth.zeta = spec.model_kind == ModelKind::kMnl ? Eigen::MatrixXd(spec.J, 0) : spec.zeta;
  truth.omega = spec.model_kind == ModelKind::kMnl ? Eigen::MatrixXd(0, 0) : spec.omega;
  truth.beta.assign(static_cast<std::size_t>(spec.J), Eigen::MatrixXd(spec.N, spec.K));
  if (spec.K > 0) {
    const PdMatrix omega(spec.omega, "scenario_omega");
    for (int n = 0; n < spec.N; ++n) {
      RngStream stream = taste_stream(n);
      for (int j = 0; j < spec.J; ++j) {
        truth.beta[static_cast<std::size_t>(j)].row(n) =
            sample_mvn_cov(spec.zeta.row(j).transpose(), omega, stream).transpose();
      }
    }
  }
  draw_choices(data, representative_utility(data, truth), spec.seed, 0, rule);
  return {std::move(data), std::move(truth)};
}

ScenarioSpec preset(const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  if (name == "mnl-j3") {
    spec.model_kind = ModelKind::kMnl;
    spec.N = 1000;
    spec.T = 5;
    spec.J = 3;
    spec.L = 2;
    spec.K = 0;
    spec.alpha = Eigen::MatrixXd(3, 2);
    spec.alpha << 1.0, -0.5,
                  -1.0, 0.5,
                  0.5, 1.0;
    spec.zeta = Eigen::MatrixXd(3, 0);
    spec.omega = Eigen::MatrixXd(0, 0);
    spec.covariate_law = CovariateLaw::kNormal;
    spec.seed = 20190413;
    return spec;
  }
  if (name == "mmnl-j2") {
    spec.model_kind = ModelKind::kMmnlGeneric;
    spec.N = 500;
    spec.T = 8;
    spec.J = 2;
    spec.L = 1;
    spec.K = 2;
    spec.alpha = Eigen::MatrixXd::Constant(1, 1, -0.5);
    spec.zeta = Eigen::MatrixXd(1, 2);
    spec.zeta << 1.0, -1.0;
    spec.omega = Eigen::MatrixXd(2, 2);
    spec.omega << 0.5, 0.1,
                  0.1, 0.5;
    spec.covariate_law = CovariateLaw::kReferenceZero;
    spec.seed = 20190414;
    return spec;
  }
  if (name == "mmnl-j3") {
    spec.model_kind = ModelKind::kMmnlAltSpecific;
    spec.N = 500;
    spec.T = 8;
    spec.J = 3;
    spec.L = 1;
    spec.K = 2;
    spec.alpha = Eigen::MatrixXd(3, 1);
    spec.alpha << 0.5, -0.5, 0.0;
    spec.zeta = Eigen::MatrixXd(3, 2);
    spec.zeta << 1.0, -1.0,
                 -0.5, 0.5,
                 0.5, 0.5;
    spec.omega = Eigen::MatrixXd(2, 2);
    spec.omega << 0.5, 0.1,
                  0.1, 0.5;
    spec.covariate_law = CovariateLaw::kNormal;
    spec.seed = 20190415;
    return spec;
  }
  throw InvalidInput("unknown preset '" + name + "' (known: mnl-j3, mmnl-j2, mmnl-j3)");
}

}  // namespace mixlogit
