#include "mixlogit/sampler_pg.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"

namespace mixlogit {

std::string to_string(PhiSchedule s) {
  return s == PhiSchedule::kPrinted ? "printed" : "before-block";
}

PhiSchedule parse_phi_schedule(const std::string& text) {
  if (text == "printed") return PhiSchedule::kPrinted;
  if (text == "before-block") return PhiSchedule::kBeforeBlock;
  throw InvalidInput("unknown phi schedule '" + text + "' (printed|before-block)");
}

void PgConfig::validate() const {
  if (n_iter <= 0 || n_burn < 0 || n_burn >= n_iter) {
    throw InvalidInput("PgConfig: need 0 <= n_burn < n_iter");
  }
  if (thin < 1) throw InvalidInput("PgConfig: thin must be >= 1");
  if (threads < 1) throw InvalidInput("PgConfig: threads must be >= 1");
  if (!(divergence.v_max > 0.0) || !(divergence.param_max > 0.0) || divergence.window < 1) {
    throw InvalidInput("PgConfig: divergence thresholds must be positive");
  }
}

PgWorkspace make_workspace(const ChoiceDataset& data, const AltSpecificParamState& state) {
  PgWorkspace ws;
  ws.v = representative_utility(data, state);
  ws.L = UtilityTensor(data.N, data.T, data.J);
  ws.eta = UtilityTensor(data.N, data.T, data.J);
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      const auto row = ws.v.row(n, t);
      for (int j = 0; j < data.J; ++j) {
        const double l = log_sum_exp_excluding(row, static_cast<std::size_t>(j));
        ws.L(n, t, j) = l;
        ws.eta(n, t, j) = ws.v(n, t, j) - l;
      }
    }
  }
  return ws;
}

AltSpecificParamState initial_alt_state(const ChoiceDataset& data, const HyperParameters& hyper,
                                        std::uint64_t seed, std::uint64_t chain) {
  AltSpecificParamState s;
  s.alpha = hyper.lambda0.transpose().replicate(data.J, 1);
  s.zeta = hyper.mu0.transpose().replicate(data.J, 1);
  s.omega = Eigen::MatrixXd::Identity(data.K, data.K);
  s.a = Eigen::VectorXd(data.K);
  for (int k = 0; k < data.K; ++k) s.a(k) = hyper.a_prior_rate(k);
  s.beta.assign(static_cast<std::size_t>(data.J), hyper.mu0.transpose().replicate(data.N, 1));
  s.phi.assign(static_cast<std::size_t>(data.J), Eigen::MatrixXd(data.N, data.T));
  for (int j = 0; j < data.J; ++j) {
    for (int n = 0; n < data.N; ++n) {
      RngStream stream(seed, {Purpose::kInit, 0, chain,
                              static_cast<std::uint64_t>(j) * data.N + n});
      for (int k = 0; k < data.K; ++k) s.beta[static_cast<std::size_t>(j)](n, k) += stream.normal();
      for (int t = 0; t < data.T; ++t) {
        s.phi[static_cast<std::size_t>(j)](n, t) = sample_polya_gamma(0.0, stream);
      }
    }
  }
  return s;
}

Eigen::VectorXd update_a_pg(const AltSpecificParamState& state, const HyperParameters& hyper,
                            RngStream& stream, Mutation mutation) {
  const PdMatrix omega(state.omega, "omega_for_a");
  return draw_half_t_scales(omega.inverse(), hyper, stream, mutation);
}

PdMatrix update_omega_pg(const AltSpecificParamState& state, const HyperParameters& hyper,
                         RngStream& stream, Mutation mutation) {
  const Eigen::Index K = state.omega.rows();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(K, K);
  double count = 0.0;
  for (std::size_t j = 0; j < state.beta.size(); ++j) {
    const Eigen::MatrixXd centered =
        state.beta[j].rowwise() - state.zeta.row(static_cast<Eigen::Index>(j));
    scatter += centered.transpose() * centered;
    count += static_cast<double>(centered.rows());
  }
  return draw_covariance(scatter, count, state.a, hyper, stream, mutation);
}

Eigen::VectorXd update_zeta_pg(const AltSpecificParamState& state, int i,
                               const HyperParameters& hyper, ZetaUpdate form, RngStream& stream,
                               Mutation mutation) {
  return draw_population_mean(state.beta[static_cast<std::size_t>(i)],
                              PdMatrix(state.omega, "omega_for_zeta"), hyper, form, stream,
                              mutation);
}

namespace {

double signed_kappa(const ChoiceDataset& data, int n, int t, int i, Mutation mutation,
                    Mutation flipped_by) {
  const double k = kappa(data.choice(n, t) == i ? 1 : 0);
  return mutation == flipped_by ? -k : k;
}

}  // namespace

GaussianConditional beta_conditional_pg(const AltSpecificParamState& state,
                                        const ChoiceDataset& data, const PgWorkspace& ws,
                                        const Eigen::MatrixXd& omega_inverse, int n, int i,
                                        Mutation mutation) {
  const auto ui = static_cast<std::size_t>(i);
  GaussianConditional c{omega_inverse,
                        omega_inverse * state.zeta.row(i).transpose()};
  for (int t = 0; t < data.T; ++t) {
    const auto xr = data.random_row(n, t, i);
    const double phi = state.phi[ui](n, t);
    const double offset = data.fixed_row(n, t, i).dot(state.alpha.row(i).transpose()) -
                          ws.L(n, t, i);
    const double k = signed_kappa(data, n, t, i, mutation, Mutation::kBeta);
    c.precision.noalias() += phi * xr * xr.transpose();
    c.linear.noalias() += (k - phi * offset) * xr;
  }
  return c;
}

Eigen::VectorXd update_beta_pg(const AltSpecificParamState& state, const ChoiceDataset& data,
                               const PgWorkspace& ws, const Eigen::MatrixXd& omega_inverse, int n,
                               int i, RngStream& stream, Mutation mutation) {
  const GaussianConditional c =
      beta_conditional_pg(state, data, ws, omega_inverse, n, i, mutation);
  return sample_mvn_precision(PdMatrix(c.precision, "beta_precision"), c.linear, stream);
}

GaussianConditional alpha_conditional_pg(const AltSpecificParamState& state,
                                         const ChoiceDataset& data, const PgWorkspace& ws,
                                         const HyperParameters& hyper, int i, Mutation mutation) {
  const auto ui = static_cast<std::size_t>(i);
  const PdMatrix xi0(hyper.xi0, "alpha_prior");
  const Eigen::MatrixXd xi0_inv = xi0.inverse();
  GaussianConditional c{xi0_inv, xi0_inv * hyper.lambda0};
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      const auto xf = data.fixed_row(n, t, i);
      const double phi = state.phi[ui](n, t);
      double offset = -ws.L(n, t, i);
      if (data.K > 0) offset += data.random_row(n, t, i).dot(state.beta[ui].row(n).transpose());
      const double k = signed_kappa(data, n, t, i, mutation, Mutation::kAlpha);
      c.precision.noalias() += phi * xf * xf.transpose();
      c.linear.noalias() += (k - phi * offset) * xf;
    }
  }
  return c;
}

Eigen::VectorXd update_alpha_pg(const AltSpecificParamState& state, const ChoiceDataset& data,
                                const PgWorkspace& ws, const HyperParameters& hyper, int i,
                                RngStream& stream, Mutation mutation) {
  const GaussianConditional c = alpha_conditional_pg(state, data, ws, hyper, i, mutation);
  return sample_mvn_precision(PdMatrix(c.precision, "alpha_precision"), c.linear, stream);
}

void refresh_eta_L(const ChoiceDataset& data, const AltSpecificParamState& state, int i,
                   PgWorkspace& ws) {
  const auto ui = static_cast<std::size_t>(i);
  const Eigen::VectorXd alpha_i = state.alpha.row(i).transpose();
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      double u = data.fixed_row(n, t, i).dot(alpha_i);
      if (data.K > 0) u += data.random_row(n, t, i).dot(state.beta[ui].row(n).transpose());
      ws.v(n, t, i) = u;
      const auto row = ws.v.row(n, t);
      for (int j = 0; j < data.J; ++j) {
        const double l = log_sum_exp_excluding(row, static_cast<std::size_t>(j));
        ws.L(n, t, j) = l;
        ws.eta(n, t, j) = ws.v(n, t, j) - l;
      }
    }
  }
}

Eigen::MatrixXd update_phi(const PgWorkspace& ws, int i, std::uint64_t seed,
                           std::uint64_t iteration, std::uint64_t chain, int threads) {
  const int N = ws.eta.N;
  const int T = ws.eta.T;
  Eigen::MatrixXd phi(N, T);
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for num_threads(threads) schedule(static)
  for (int n = 0; n < N; ++n) {
    try {
      for (int t = 0; t < T; ++t) {
        const std::uint64_t unit =
            (static_cast<std::uint64_t>(i) * N + static_cast<std::uint64_t>(n)) * T + t;
        RngStream stream(seed, {Purpose::kPhi, iteration, chain, unit});
        phi(n, t) = sample_polya_gamma(ws.eta(n, t, i), stream);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return phi;
}

PgSampler::PgSampler(ChoiceDataset data, HyperParameters hyper, PgConfig config)
    : data_(std::move(data)), hyper_(std::move(hyper)), config_(config) {
  config_.validate();
  data_.validate();
  if (data_.J < 2) throw InvalidInput("PgSampler: needs at least two alternatives");
  hyper_.validate(data_.L, data_.K);
  state_ = initial_alt_state(data_, hyper_, config_.seed, config_.chain);
  ws_ = make_workspace(data_, state_);
}

void PgSampler::set_state(AltSpecificParamState state) {
  state_ = std::move(state);
  ws_ = make_workspace(data_, state_);
}

void PgSampler::set_choices(const std::vector<int>& y) {
  if (y.size() != data_.y.size()) throw InvalidInput("set_choices: size mismatch");
  data_.y = y;
}

void PgSampler::refresh(int i) {
  refresh_eta_L(data_, state_, i, ws_);
  if (!config_.check_freshness) return;
  const PgWorkspace full = make_workspace(data_, state_);
  for (std::size_t c = 0; c < full.v.values.size(); ++c) {
    const double dv = std::abs(full.v.values[c] - ws_.v.values[c]);
    const double dl = std::abs(full.L.values[c] - ws_.L.values[c]);
    const double de = std::abs(full.eta.values[c] - ws_.eta.values[c]);
    if (!(dv <= 1e-12 && dl <= 1e-12 && de <= 1e-12)) {
      throw InvalidState("PgSampler: stale eta/L after refresh of alternative " +
                         std::to_string(i));
    }
  }
}

void PgSampler::sweep(std::int64_t iteration) {
  const auto it = static_cast<std::uint64_t>(iteration);
  const int K = data_.K;
  Eigen::MatrixXd omega_inv;
  if (K > 0) {
    RngStream a_stream(config_.seed, {Purpose::kA, it, config_.chain, 0});
    state_.a = update_a_pg(state_, hyper_, a_stream, config_.mutation);
    RngStream omega_stream(config_.seed, {Purpose::kOmega, it, config_.chain, 0});
    const PdMatrix omega = update_omega_pg(state_, hyper_, omega_stream, config_.mutation);
    state_.omega = omega.matrix();
    omega_inv = omega.inverse();
  }

  for (int i = 0; i < data_.J; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (K > 0) {
      RngStream zeta_stream(config_.seed, {Purpose::kZeta, it, config_.chain, ui});
      state_.zeta.row(i) = update_zeta_pg(state_, i, hyper_, config_.zeta_update, zeta_stream,
                                          config_.mutation)
                               .transpose();
    }
    if (config_.phi_schedule == PhiSchedule::kBeforeBlock) {
      state_.phi[ui] = update_phi(ws_, i, config_.seed, it, config_.chain, config_.threads);
    }
    if (K > 0) {
      std::exception_ptr failure;
      std::mutex failure_mutex;
#pragma omp parallel for num_threads(config_.threads) schedule(static)
      for (int n = 0; n < data_.N; ++n) {
        try {
          RngStream stream(config_.seed,
                           {Purpose::kBeta, it, config_.chain,
                            static_cast<std::uint64_t>(i) * data_.N + static_cast<std::uint64_t>(n)});
          const Eigen::VectorXd draw =
              update_beta_pg(state_, data_, ws_, omega_inv, n, i, stream, config_.mutation);
          state_.beta[ui].row(n) = draw.transpose();
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
      refresh(i);
    }
    if (data_.L > 0) {
      RngStream alpha_stream(config_.seed, {Purpose::kAlpha, it, config_.chain, ui});
      state_.alpha.row(i) =
          update_alpha_pg(state_, data_, ws_, hyper_, i, alpha_stream, config_.mutation)
              .transpose();
      refresh(i);
    }
    if (config_.phi_schedule == PhiSchedule::kPrinted) {
      state_.phi[ui] = update_phi(ws_, i, config_.seed, it, config_.chain, config_.threads);
    }
  }
}

std::vector<std::string> alt_param_names(int J, int L, int K, int N, bool with_beta) {
  std::vector<std::string> names;
  auto idx = [](int x) { return "[" + std::to_string(x + 1) + "]"; };
  for (int j = 0; j < J; ++j) {
    for (int l = 0; l < L; ++l) names.push_back("alpha" + idx(j) + idx(l));
  }
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) names.push_back("zeta" + idx(j) + idx(k));
  }
  for (int k1 = 0; k1 < K; ++k1) {
    for (int k2 = k1; k2 < K; ++k2) names.push_back("omega" + idx(k1) + idx(k2));
  }
  for (int k = 0; k < K; ++k) names.push_back("a" + idx(k));
  if (with_beta) {
    for (int n = 0; n < N; ++n) {
      for (int j = 0; j < J; ++j) {
        for (int k = 0; k < K; ++k) names.push_back("beta" + idx(n) + idx(j) + idx(k));
      }
    }
  }
  return names;
}

std::vector<double> flatten(const AltSpecificParamState& s, bool with_beta) {
  std::vector<double> out;
  const Eigen::Index J = s.alpha.rows();
  const Eigen::Index K = s.omega.rows();
  for (Eigen::Index j = 0; j < J; ++j) {
    for (Eigen::Index l = 0; l < s.alpha.cols(); ++l) out.push_back(s.alpha(j, l));
  }
  for (Eigen::Index j = 0; j < J; ++j) {
    for (Eigen::Index k = 0; k < K; ++k) out.push_back(s.zeta(j, k));
  }
  for (Eigen::Index k1 = 0; k1 < K; ++k1) {
    for (Eigen::Index k2 = k1; k2 < K; ++k2) out.push_back(s.omega(k1, k2));
  }
  for (Eigen::Index k = 0; k < K; ++k) out.push_back(s.a(k));
  if (with_beta && K > 0) {
    const Eigen::Index N = s.beta.front().rows();
    for (Eigen::Index n = 0; n < N; ++n) {
      for (Eigen::Index j = 0; j < J; ++j) {
        for (Eigen::Index k = 0; k < K; ++k) out.push_back(s.beta[static_cast<std::size_t>(j)](n, k));
      }
    }
  }
  return out;
}

double max_abs_parameter(const AltSpecificParamState& s) {
  double m = 0.0;
  auto scan = [&m](const Eigen::MatrixXd& x) {
    if (x.size() == 0) return;
    if (!x.allFinite()) {
      m = std::numeric_limits<double>::infinity();
      return;
    }
    m = std::max(m, x.cwiseAbs().maxCoeff());
  };
  scan(s.alpha);
  scan(s.zeta);
  scan(s.omega);
  for (const auto& b : s.beta) scan(b);
  return m;
}

RunResult run_pg(const ChoiceDataset& data, const HyperParameters& hyper, const PgConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  PgSampler sampler(data, hyper, config);

  RunResult result;
  Chain& chain = result.chain;
  chain.names = alt_param_names(data.J, data.L, data.K, data.N, config.store_beta);
  for (const char* m :
       {"log_likelihood", "max_abs_v", "mean_chosen_prob", "max_abs_param", "mean_phi"}) {
    chain.monitors[m] = {};
  }
  DivergenceMonitor monitor(config.divergence);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::int64_t it = 1; it <= config.n_iter; ++it) {
    MonitorPoint point{it, nan, nan, nan};
    double loglik = nan;
    double mean_phi = nan;
    try {
      sampler.sweep(it);
      const UtilityTensor& v = sampler.workspace().v;
      point.max_abs_v = max_abs_utility(v);
      point.max_abs_param = max_abs_parameter(sampler.state());
      if (std::isfinite(point.max_abs_v)) {
        point.mean_chosen_prob = mean_chosen_probability(data, v);
        loglik = total_log_likelihood(data, v);
      }
      double phi_sum = 0.0;
      for (const auto& p : sampler.state().phi) phi_sum += p.sum();
      mean_phi = phi_sum / (static_cast<double>(data.N) * data.T * data.J);
    } catch (const std::exception&) {
      // Numerical breakdown inside the sweep: recorded as non-finite below.
    }
    chain.monitors["log_likelihood"].push_back(loglik);
    chain.monitors["max_abs_v"].push_back(point.max_abs_v);
    chain.monitors["mean_chosen_prob"].push_back(point.mean_chosen_prob);
    chain.monitors["max_abs_param"].push_back(point.max_abs_param);
    chain.monitors["mean_phi"].push_back(mean_phi);

    if (monitor.observe(point)) break;

    if (it > config.n_burn && (it - config.n_burn) % config.thin == 0) {
      chain.add_draw(it, flatten(sampler.state(), config.store_beta));
    }
  }

  result.divergence = monitor.report();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  chain.meta["sampler"] = "pg";
  chain.meta["seed"] = config.seed;
  chain.meta["chain"] = config.chain;
  chain.meta["dataset_digest"] = data.digest();
  return result;
}

}  // namespace mixlogit
