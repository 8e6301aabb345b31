#include "mixlogit/geweke.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "mixlogit/diagnostics.hpp"
#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"
#include "mixlogit/sampler_mh.hpp"

namespace mixlogit {

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::kMh:
      return "mh";
    case SamplerKind::kPg:
      return "pg";
    case SamplerKind::kPrior:
      return "prior";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(const std::string& text) {
  if (text == "mh") return SamplerKind::kMh;
  if (text == "pg") return SamplerKind::kPg;
  if (text == "prior") return SamplerKind::kPrior;
  throw InvalidInput("unknown sampler '" + text + "' (mh|pg|prior)");
}

GewekeToySpec GewekeToySpec::defaults(int N, int T, int J, int L, int K) {
  GewekeToySpec s;
  s.N = N;
  s.T = T;
  s.J = J;
  s.L = L;
  s.K = K;
  s.hyper.lambda0 = Eigen::VectorXd::Zero(L);
  s.hyper.xi0 = Eigen::MatrixXd::Identity(L, L);
  s.hyper.mu0 = Eigen::VectorXd::Zero(K);
  s.hyper.sigma0 = Eigen::MatrixXd::Identity(K, K);
  s.hyper.nu = 8.0;
  s.hyper.A = Eigen::VectorXd::Ones(K);
  return s;
}

void GewekeToySpec::validate() const {
  if (N < 1 || N > 10 || T < 1 || T > 3 || J < 2 || J > 3 || K < 0 || K > 2 || L < 0) {
    throw InvalidInput("GewekeToySpec: toy scale requires N <= 10, T <= 3, 2 <= J <= 3, K <= 2");
  }
  if (L + K == 0) throw InvalidInput("GewekeToySpec: need at least one coefficient");
  hyper.validate(L, K);
  if (!(rho_beta > 0.0) || !(rho_alpha > 0.0)) {
    throw InvalidInput("GewekeToySpec: step sizes must be positive");
  }
}

double GewekeResult::max_abs_z() const {
  double m = 0.0;
  for (const auto& r : rows) {
    const double a = std::abs(r.z);
    if (!(a <= m)) m = a;  // NaN counts as failure
  }
  return m;
}

namespace {

struct Model {
  const GewekeToySpec& spec;
  PdMatrix xi0;
  PdMatrix sigma0;

  explicit Model(const GewekeToySpec& s)
      : spec(s), xi0(s.hyper.xi0, "geweke_xi0"), sigma0(s.hyper.sigma0, "geweke_sigma0") {}

  void draw_hierarchy(Eigen::VectorXd& a, Eigen::MatrixXd& omega, RngStream& stream) const {
    const int K = spec.K;
    a = Eigen::VectorXd(K);
    for (int k = 0; k < K; ++k) {
      a(k) = sample_gamma(spec.hyper.a_prior_shape(), spec.hyper.a_prior_rate(k), stream);
    }
    omega = K > 0 ? sample_inverse_wishart(spec.hyper.omega_prior_df(),
                                           PdMatrix(spec.hyper.omega_prior_scale(a), "geweke_iw"),
                                           stream)
                        .matrix()
                  : Eigen::MatrixXd(0, 0);
  }

  GenericParamState prior_generic(RngStream& stream) const {
    GenericParamState s;
    s.alpha = sample_mvn_cov(spec.hyper.lambda0, xi0, stream);
    s.zeta = spec.K > 0 ? sample_mvn_cov(spec.hyper.mu0, sigma0, stream) : Eigen::VectorXd();
    draw_hierarchy(s.a, s.omega, stream);
    s.beta = Eigen::MatrixXd(spec.N, spec.K);
    if (spec.K > 0) {
      const PdMatrix omega(s.omega, "geweke_omega");
      for (int n = 0; n < spec.N; ++n) {
        s.beta.row(n) = sample_mvn_cov(s.zeta, omega, stream).transpose();
      }
    }
    return s;
  }

  AltSpecificParamState prior_alt(RngStream& stream) const {
    AltSpecificParamState s;
    s.alpha = Eigen::MatrixXd(spec.J, spec.L);
    s.zeta = Eigen::MatrixXd(spec.J, spec.K);
    for (int j = 0; j < spec.J; ++j) {
      s.alpha.row(j) = sample_mvn_cov(spec.hyper.lambda0, xi0, stream).transpose();
      if (spec.K > 0) s.zeta.row(j) = sample_mvn_cov(spec.hyper.mu0, sigma0, stream).transpose();
    }
    draw_hierarchy(s.a, s.omega, stream);
    s.beta.assign(static_cast<std::size_t>(spec.J), Eigen::MatrixXd(spec.N, spec.K));
    if (spec.K > 0) {
      const PdMatrix omega(s.omega, "geweke_omega");
      for (int j = 0; j < spec.J; ++j) {
        for (int n = 0; n < spec.N; ++n) {
          s.beta[static_cast<std::size_t>(j)].row(n) =
              sample_mvn_cov(s.zeta.row(j).transpose(), omega, stream).transpose();
        }
      }
    }
    // Auxiliaries from their exact conditional given the parameters.
    s.phi.assign(static_cast<std::size_t>(spec.J), Eigen::MatrixXd::Zero(spec.N, spec.T));
    return s;
  }
};

void fill_phi(AltSpecificParamState& s, const ChoiceDataset& data, RngStream& stream) {
  const UtilityTensor v = representative_utility(data, s);
  for (int j = 0; j < data.J; ++j) {
    const LogitReduction red = compute_L_eta(v, j);
    for (int n = 0; n < data.N; ++n) {
      for (int t = 0; t < data.T; ++t) {
        s.phi[static_cast<std::size_t>(j)](n, t) = sample_polya_gamma(red.eta(n, t), stream);
      }
    }
  }
}

std::vector<std::string> test_names(const GewekeToySpec& spec, bool alt) {
  std::vector<std::string> names;
  auto idx = [](int x) { return "[" + std::to_string(x + 1) + "]"; };
  const int rows = alt ? spec.J : 1;
  for (int j = 0; j < rows; ++j) {
    const std::string pre = alt ? idx(j) : "";
    for (int l = 0; l < spec.L; ++l) {
      names.push_back("alpha" + pre + idx(l));
      names.push_back("alpha" + pre + idx(l) + "^2");
    }
  }
  for (int j = 0; j < rows; ++j) {
    const std::string pre = alt ? idx(j) : "";
    for (int k = 0; k < spec.K; ++k) {
      names.push_back("zeta" + pre + idx(k));
      names.push_back("zeta" + pre + idx(k) + "^2");
    }
  }
  for (int k1 = 0; k1 < spec.K; ++k1) {
    for (int k2 = k1; k2 < spec.K; ++k2) names.push_back("omega" + idx(k1) + idx(k2));
  }
  for (int k = 0; k < spec.K; ++k) names.push_back("a" + idx(k));
  if (spec.K > 0) names.push_back("mean_beta_sq");
  names.push_back("share_alt1");
  return names;
}

double share_first(const ChoiceDataset& data) {
  double c = 0.0;
  for (int y : data.y) c += y == 0 ? 1.0 : 0.0;
  return c / static_cast<double>(data.y.size());
}

void append_common(std::vector<double>& g, const Eigen::MatrixXd& omega, const Eigen::VectorXd& a,
                   double mean_beta_sq, int K, const ChoiceDataset& data) {
  for (int k1 = 0; k1 < K; ++k1) {
    for (int k2 = k1; k2 < K; ++k2) g.push_back(omega(k1, k2));
  }
  for (int k = 0; k < K; ++k) g.push_back(a(k));
  if (K > 0) g.push_back(mean_beta_sq);
  g.push_back(share_first(data));
}

std::vector<double> test_values(const GenericParamState& s, const ChoiceDataset& data) {
  std::vector<double> g;
  for (Eigen::Index l = 0; l < s.alpha.size(); ++l) {
    g.push_back(s.alpha(l));
    g.push_back(s.alpha(l) * s.alpha(l));
  }
  for (Eigen::Index k = 0; k < s.zeta.size(); ++k) {
    g.push_back(s.zeta(k));
    g.push_back(s.zeta(k) * s.zeta(k));
  }
  const double mbs = data.K > 0 ? s.beta.squaredNorm() / static_cast<double>(data.N) : 0.0;
  append_common(g, s.omega, s.a, mbs, data.K, data);
  return g;
}

std::vector<double> test_values(const AltSpecificParamState& s, const ChoiceDataset& data) {
  std::vector<double> g;
  for (Eigen::Index j = 0; j < s.alpha.rows(); ++j) {
    for (Eigen::Index l = 0; l < s.alpha.cols(); ++l) {
      g.push_back(s.alpha(j, l));
      g.push_back(s.alpha(j, l) * s.alpha(j, l));
    }
  }
  for (Eigen::Index j = 0; j < s.zeta.rows(); ++j) {
    for (Eigen::Index k = 0; k < s.zeta.cols(); ++k) {
      g.push_back(s.zeta(j, k));
      g.push_back(s.zeta(j, k) * s.zeta(j, k));
    }
  }
  double mbs = 0.0;
  for (const auto& b : s.beta) mbs += b.squaredNorm();
  mbs /= static_cast<double>(data.N) * data.J;
  append_common(g, s.omega, s.a, mbs, data.K, data);
  return g;
}

class Recorder {
 public:
  explicit Recorder(std::size_t width) : width_(width) {}
  void add(const std::vector<double>& g) { values_.insert(values_.end(), g.begin(), g.end()); }
  std::vector<double> column(std::size_t p) const {
    const std::size_t n = values_.size() / width_;
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = values_[i * width_ + p];
    return c;
  }

 private:
  std::size_t width_;
  std::vector<double> values_;
};

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size() - 1);
}

template <typename State, typename PriorDraw, typename Transition, typename SetChoices>
GewekeResult run_test(const GewekeToySpec& spec, ChoiceDataset data, std::int64_t n_outer,
                      const std::vector<std::string>& names, PriorDraw prior_draw,
                      Transition transition, SetChoices set_choices) {
  Recorder marginal(names.size());
  Recorder successive(names.size());

  for (std::int64_t m = 0; m < n_outer; ++m) {
    RngStream stream(spec.seed, {Purpose::kGeweke, static_cast<std::uint64_t>(m), 0, 0});
    State s = prior_draw(stream, data);
    draw_choices(data, representative_utility(data, s), spec.seed,
                 2 * static_cast<std::uint64_t>(m));
    marginal.add(test_values(s, data));
  }

  RngStream init_stream(spec.seed, {Purpose::kGeweke, 0, 1, 0});
  State s = prior_draw(init_stream, data);
  draw_choices(data, representative_utility(data, s), spec.seed, 1);
  set_choices(data, s);
  GewekeResult result;
  for (std::int64_t m = 1; m <= n_outer; ++m) {
    try {
      s = transition(m);
      draw_choices(data, representative_utility(data, s), spec.seed,
                   2 * static_cast<std::uint64_t>(m) + 1);
      set_choices(data, s);
    } catch (const std::exception& e) {
      result.failure = "transition failed at outer draw " + std::to_string(m) + ": " + e.what();
      break;
    }
    successive.add(test_values(s, data));
  }

  result.n_outer = n_outer;
  for (std::size_t p = 0; p < names.size(); ++p) {
    const auto a = marginal.column(p);
    const auto b = successive.column(p);
    GewekeRow row;
    row.name = names[p];
    row.mean_marginal = mean_of(a);
    row.mean_successive = mean_of(b);
    const double var_a = variance_of(a, row.mean_marginal);
    const double var_b = variance_of(b, row.mean_successive);
    row.se_marginal = std::sqrt(var_a / static_cast<double>(a.size()));
    bool all_finite = result.failure.empty() && b.size() > 1 &&
                      std::isfinite(row.mean_successive) && std::isfinite(var_b);
    double ess = static_cast<double>(b.size());
    if (all_finite) ess = effective_sample_size(b);
    row.se_successive = all_finite ? std::sqrt(var_b / ess) : 0.0;
    const double se = std::hypot(row.se_marginal, row.se_successive);
    const double diff = row.mean_marginal - row.mean_successive;
    if (!all_finite) {
      row.z = std::numeric_limits<double>::infinity();
    } else if (se > 0.0) {
      row.z = diff / se;
    } else {
      row.z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace

GewekeResult geweke_joint_test(SamplerKind sampler, const GewekeToySpec& spec,
                               std::int64_t n_outer, Mutation mutation) {
  spec.validate();
  if (n_outer < kMinGewekeOuter) {
    throw InvalidInput("geweke_joint_test: n_outer must be at least " +
                       std::to_string(kMinGewekeOuter) + " (got " + std::to_string(n_outer) +
                       ")");
  }
  const Model model(spec);
  ChoiceDataset data =
      generate_covariates(spec.N, spec.T, spec.J, spec.L, spec.K, spec.covariate_law, spec.seed);

  GewekeResult result;
  const bool alt = sampler == SamplerKind::kPg ||
                   (sampler == SamplerKind::kPrior && spec.prior_alt_specific);
  const auto names = test_names(spec, alt);

  if (sampler == SamplerKind::kMh) {
    MhConfig config;
    config.seed = spec.seed + 1;
    config.rho_beta = spec.rho_beta;
    config.rho_alpha = spec.rho_alpha;
    config.zeta_update = spec.zeta_update;
    config.mutation = mutation;
    MhSampler mh(data, spec.hyper, config);
    result = run_test<GenericParamState>(
        spec, data, n_outer, names,
        [&](RngStream& st, const ChoiceDataset&) { return model.prior_generic(st); },
        [&](std::int64_t m) {
          mh.sweep(m);
          return mh.state();
        },
        [&](const ChoiceDataset& d, const GenericParamState& s) {
          mh.set_state(s);
          mh.set_choices(d.y);
        });
  } else if (sampler == SamplerKind::kPg) {
    PgConfig config;
    config.seed = spec.seed + 1;
    config.zeta_update = spec.zeta_update;
    config.phi_schedule = spec.phi_schedule;
    config.mutation = mutation;
    PgSampler pg(data, spec.hyper, config);
    result = run_test<AltSpecificParamState>(
        spec, data, n_outer, names,
        [&](RngStream& st, const ChoiceDataset& d) {
          AltSpecificParamState s = model.prior_alt(st);
          fill_phi(s, d, st);
          return s;
        },
        [&](std::int64_t m) {
          pg.sweep(m);
          return pg.state();
        },
        [&](const ChoiceDataset& d, const AltSpecificParamState& s) {
          pg.set_state(s);
          pg.set_choices(d.y);
        });
  } else if (alt) {
    result = run_test<AltSpecificParamState>(
        spec, data, n_outer, names,
        [&](RngStream& st, const ChoiceDataset&) { return model.prior_alt(st); },
        [&](std::int64_t m) {
          RngStream st(spec.seed, {Purpose::kGeweke, static_cast<std::uint64_t>(m), 2, 0});
          return model.prior_alt(st);
        },
        [](const ChoiceDataset&, const AltSpecificParamState&) {});
  } else {
    result = run_test<GenericParamState>(
        spec, data, n_outer, names,
        [&](RngStream& st, const ChoiceDataset&) { return model.prior_generic(st); },
        [&](std::int64_t m) {
          RngStream st(spec.seed, {Purpose::kGeweke, static_cast<std::uint64_t>(m), 2, 0});
          return model.prior_generic(st);
        },
        [](const ChoiceDataset&, const GenericParamState&) {});
  }
  result.sampler = sampler;
  if (!result.failure.empty()) {
    for (auto& row : result.rows) row.z = std::numeric_limits<double>::infinity();
  }
  result.mutation = mutation;
  return result;
}

}  // namespace mixlogit
