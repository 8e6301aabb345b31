#include "mixlogit/sampler_mh.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"

namespace mixlogit {

void MhConfig::validate() const {
  if (n_iter <= 0 || n_burn < 0 || n_burn >= n_iter) {
    throw InvalidInput("MhConfig: need 0 <= n_burn < n_iter");
  }
  if (thin < 1) throw InvalidInput("MhConfig: thin must be >= 1");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw InvalidInput("MhConfig: target_accept must lie in (0, 1)");
  }
  if (!(rho_beta > 0.0) || !(rho_alpha > 0.0)) {
    throw InvalidInput("MhConfig: rho_beta and rho_alpha must be positive");
  }
  if (adapt_every < 1 || !(adapt_factor > 1.0)) {
    throw InvalidInput("MhConfig: adapt_every >= 1 and adapt_factor > 1 required");
  }
  if (threads < 1) throw InvalidInput("MhConfig: threads must be >= 1");
}

GenericParamState initial_generic_state(const ChoiceDataset& data, const HyperParameters& hyper,
                                        std::uint64_t seed, std::uint64_t chain) {
  GenericParamState s;
  s.alpha = hyper.lambda0;
  s.zeta = hyper.mu0;
  s.omega = Eigen::MatrixXd::Identity(data.K, data.K);
  s.a = Eigen::VectorXd(data.K);
  for (int k = 0; k < data.K; ++k) s.a(k) = hyper.a_prior_rate(k);
  s.beta = Eigen::MatrixXd(data.N, data.K);
  for (int n = 0; n < data.N; ++n) {
    RngStream stream(seed, {Purpose::kInit, 0, chain, static_cast<std::uint64_t>(n)});
    for (int k = 0; k < data.K; ++k) s.beta(n, k) = hyper.mu0(k) + stream.normal();
  }
  return s;
}

Eigen::VectorXd update_a(const GenericParamState& state, const HyperParameters& hyper,
                         RngStream& stream, Mutation mutation) {
  const PdMatrix omega(state.omega, "omega_for_a");
  return draw_half_t_scales(omega.inverse(), hyper, stream, mutation);
}

PdMatrix update_omega_generic(const GenericParamState& state, const HyperParameters& hyper,
                              RngStream& stream, Mutation mutation) {
  const Eigen::MatrixXd centered = state.beta.rowwise() - state.zeta.transpose();
  const Eigen::MatrixXd scatter = centered.transpose() * centered;
  return draw_covariance(scatter, static_cast<double>(state.beta.rows()), state.a, hyper, stream,
                         mutation);
}

Eigen::VectorXd update_zeta_generic(const GenericParamState& state, const HyperParameters& hyper,
                                    ZetaUpdate form, RngStream& stream, Mutation mutation) {
  return draw_population_mean(state.beta, PdMatrix(state.omega, "omega_for_zeta"), hyper, form,
                              stream, mutation);
}

MhSampler::MhSampler(ChoiceDataset data, HyperParameters hyper, MhConfig config)
    : data_(std::move(data)),
      hyper_(std::move(hyper)),
      config_(config),
      rho_beta_(config.rho_beta),
      rho_alpha_(config.rho_alpha) {
  config_.validate();
  data_.validate();
  hyper_.validate(data_.L, data_.K);
  xi0_ = PdMatrix(hyper_.xi0, "alpha_prior");
  state_ = initial_generic_state(data_, hyper_, config_.seed, config_.chain);
  rebuild_caches();
}

void MhSampler::set_state(GenericParamState state) {
  state_ = std::move(state);
  rebuild_caches();
}

void MhSampler::set_choices(const std::vector<int>& y) {
  if (y.size() != data_.y.size()) throw InvalidInput("set_choices: size mismatch");
  data_.y = y;
  rebuild_caches();
}

void MhSampler::rebuild_caches() {
  fixed_part_ = UtilityTensor(data_.N, data_.T, data_.J);
  random_part_ = UtilityTensor(data_.N, data_.T, data_.J);
  for (int n = 0; n < data_.N; ++n) {
    for (int t = 0; t < data_.T; ++t) {
      for (int j = 0; j < data_.J; ++j) {
        fixed_part_(n, t, j) = data_.fixed_row(n, t, j).dot(state_.alpha);
        random_part_(n, t, j) =
            data_.K > 0 ? data_.random_row(n, t, j).dot(state_.beta.row(n).transpose()) : 0.0;
      }
    }
  }
  loglik_.assign(static_cast<std::size_t>(data_.N), 0.0);
  for (int n = 0; n < data_.N; ++n) {
    loglik_[static_cast<std::size_t>(n)] =
        data_.K > 0 ? individual_log_likelihood(n, state_.beta.row(n).transpose())
                    : individual_log_likelihood(n, Eigen::VectorXd());
  }
}

double MhSampler::individual_log_likelihood(int n, const Eigen::VectorXd& beta) const {
  std::vector<double> row(static_cast<std::size_t>(data_.J));
  double ll = 0.0;
  for (int t = 0; t < data_.T; ++t) {
    for (int j = 0; j < data_.J; ++j) {
      double v = fixed_part_(n, t, j);
      if (data_.K > 0) v += data_.random_row(n, t, j).dot(beta);
      row[static_cast<std::size_t>(j)] = v;
    }
    ll += row[static_cast<std::size_t>(data_.choice(n, t))] - log_sum_exp(row);
  }
  return ll;
}

std::int64_t MhSampler::mh_update_beta(std::int64_t iteration) {
  const PdMatrix omega(state_.omega, "omega_for_beta");
  const int K = data_.K;
  std::int64_t accepts = 0;
  std::exception_ptr failure;
  std::mutex failure_mutex;

#pragma omp parallel for num_threads(config_.threads) schedule(static) reduction(+ : accepts)
  for (int n = 0; n < data_.N; ++n) {
    try {
      RngStream stream(config_.seed, {Purpose::kBeta, static_cast<std::uint64_t>(iteration),
                                      config_.chain, static_cast<std::uint64_t>(n)});
      const double current_ll = loglik_[static_cast<std::size_t>(n)];
      if (!std::isfinite(current_ll)) {
        throw InvalidState("mh_update_beta: non-finite log-likelihood for individual " +
                           std::to_string(n));
      }
      const Eigen::VectorXd current = state_.beta.row(n).transpose();
      Eigen::VectorXd eps(K);
      for (int k = 0; k < K; ++k) eps(k) = stream.normal();
      const Eigen::VectorXd step = omega.lower().triangularView<Eigen::Lower>() * eps;
      const Eigen::VectorXd proposal = current + rho_beta_ * step;
      const double proposal_ll = individual_log_likelihood(n, proposal);
      double log_ratio = proposal_ll - current_ll;
      if (config_.mutation != Mutation::kBeta) {
        log_ratio += gaussian_log_kernel(proposal, state_.zeta, omega) -
                     gaussian_log_kernel(current, state_.zeta, omega);
      }
      if (std::isfinite(proposal_ll) && std::log(stream.uniform()) < log_ratio) {
        state_.beta.row(n) = proposal.transpose();
        loglik_[static_cast<std::size_t>(n)] = proposal_ll;
        for (int t = 0; t < data_.T; ++t) {
          for (int j = 0; j < data_.J; ++j) {
            random_part_(n, t, j) = data_.random_row(n, t, j).dot(proposal);
          }
        }
        ++accepts;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return accepts;
}

std::int64_t MhSampler::mh_update_alpha(std::int64_t iteration) {
  const int L = data_.L;
  RngStream stream(config_.seed, {Purpose::kAlpha, static_cast<std::uint64_t>(iteration),
                                  config_.chain, 0});
  double current_total = 0.0;
  for (double ll : loglik_) current_total += ll;
  if (!std::isfinite(current_total)) {
    throw InvalidState("mh_update_alpha: non-finite log-likelihood at current state");
  }
  Eigen::VectorXd eps(L);
  for (int l = 0; l < L; ++l) eps(l) = stream.normal();
  const Eigen::VectorXd step = xi0_.lower().triangularView<Eigen::Lower>() * eps;
  const Eigen::VectorXd proposal = state_.alpha + rho_alpha_ * step;

  UtilityTensor proposed_fixed(data_.N, data_.T, data_.J);
  std::vector<double> proposed_ll(static_cast<std::size_t>(data_.N));
  std::vector<double> row(static_cast<std::size_t>(data_.J));
  double proposal_total = 0.0;
  for (int n = 0; n < data_.N; ++n) {
    double ll = 0.0;
    for (int t = 0; t < data_.T; ++t) {
      for (int j = 0; j < data_.J; ++j) {
        const double f = data_.fixed_row(n, t, j).dot(proposal);
        proposed_fixed(n, t, j) = f;
        row[static_cast<std::size_t>(j)] = f + random_part_(n, t, j);
      }
      ll += row[static_cast<std::size_t>(data_.choice(n, t))] - log_sum_exp(row);
    }
    proposed_ll[static_cast<std::size_t>(n)] = ll;
    proposal_total += ll;
  }

  double log_ratio = proposal_total - current_total;
  if (config_.mutation != Mutation::kAlpha) {
    log_ratio += gaussian_log_kernel(proposal, hyper_.lambda0, xi0_) -
                 gaussian_log_kernel(state_.alpha, hyper_.lambda0, xi0_);
  }
  if (std::isfinite(proposal_total) && std::log(stream.uniform()) < log_ratio) {
    state_.alpha = proposal;
    fixed_part_ = std::move(proposed_fixed);
    loglik_ = std::move(proposed_ll);
    return 1;
  }
  return 0;
}

void MhSampler::sweep(std::int64_t iteration) {
  const auto it = static_cast<std::uint64_t>(iteration);
  if (data_.K > 0) {
    RngStream a_stream(config_.seed, {Purpose::kA, it, config_.chain, 0});
    state_.a = update_a(state_, hyper_, a_stream, config_.mutation);
    RngStream omega_stream(config_.seed, {Purpose::kOmega, it, config_.chain, 0});
    state_.omega = update_omega_generic(state_, hyper_, omega_stream, config_.mutation).matrix();
    RngStream zeta_stream(config_.seed, {Purpose::kZeta, it, config_.chain, 0});
    state_.zeta =
        update_zeta_generic(state_, hyper_, config_.zeta_update, zeta_stream, config_.mutation);
    last_beta_accepts_ = mh_update_beta(iteration);
  } else {
    last_beta_accepts_ = 0;
  }
  last_alpha_accepts_ = data_.L > 0 ? mh_update_alpha(iteration) : 0;
}

void MhSampler::adapt(double beta_rate, double alpha_rate) {
  if (data_.K > 0) {
    rho_beta_ = beta_rate > config_.target_accept ? rho_beta_ * config_.adapt_factor
                                                  : rho_beta_ / config_.adapt_factor;
  }
  if (data_.L > 0) {
    rho_alpha_ = alpha_rate > config_.target_accept ? rho_alpha_ * config_.adapt_factor
                                                    : rho_alpha_ / config_.adapt_factor;
  }
}

UtilityTensor MhSampler::utilities() const {
  UtilityTensor v = fixed_part_;
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] += random_part_.values[i];
  return v;
}

double MhSampler::log_likelihood() const {
  double s = 0.0;
  for (double ll : loglik_) s += ll;
  return s;
}

std::vector<std::string> generic_param_names(int L, int K, int N, bool with_beta) {
  std::vector<std::string> names;
  for (int l = 0; l < L; ++l) names.push_back("alpha[" + std::to_string(l + 1) + "]");
  for (int k = 0; k < K; ++k) names.push_back("zeta[" + std::to_string(k + 1) + "]");
  for (int k1 = 0; k1 < K; ++k1) {
    for (int k2 = k1; k2 < K; ++k2) {
      names.push_back("omega[" + std::to_string(k1 + 1) + "][" + std::to_string(k2 + 1) + "]");
    }
  }
  for (int k = 0; k < K; ++k) names.push_back("a[" + std::to_string(k + 1) + "]");
  if (with_beta) {
    for (int n = 0; n < N; ++n) {
      for (int k = 0; k < K; ++k) {
        names.push_back("beta[" + std::to_string(n + 1) + "][" + std::to_string(k + 1) + "]");
      }
    }
  }
  return names;
}

std::vector<double> flatten(const GenericParamState& s, bool with_beta) {
  std::vector<double> out;
  const auto K = s.zeta.size();
  for (Eigen::Index l = 0; l < s.alpha.size(); ++l) out.push_back(s.alpha(l));
  for (Eigen::Index k = 0; k < K; ++k) out.push_back(s.zeta(k));
  for (Eigen::Index k1 = 0; k1 < K; ++k1) {
    for (Eigen::Index k2 = k1; k2 < K; ++k2) out.push_back(s.omega(k1, k2));
  }
  for (Eigen::Index k = 0; k < K; ++k) out.push_back(s.a(k));
  if (with_beta) {
    for (Eigen::Index n = 0; n < s.beta.rows(); ++n) {
      for (Eigen::Index k = 0; k < K; ++k) out.push_back(s.beta(n, k));
    }
  }
  return out;
}

double max_abs_parameter(const GenericParamState& s) {
  double m = 0.0;
  auto scan = [&m](const auto& x) {
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
  scan(s.beta);
  return m;
}

RunResult run_mh(const ChoiceDataset& data, const HyperParameters& hyper, const MhConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  MhSampler sampler(config.expand_alternative_specific ? expand_alternative_specific(data) : data,
                    hyper, config);
  const ChoiceDataset& fit_data = sampler.data();

  RunResult result;
  Chain& chain = result.chain;
  chain.names = generic_param_names(fit_data.L, fit_data.K, fit_data.N, config.store_beta);
  for (const char* m : {"log_likelihood", "max_abs_v", "mean_chosen_prob", "max_abs_param",
                        "accept_beta", "accept_alpha", "rho_beta", "rho_alpha"}) {
    chain.monitors[m] = {};
  }
  DivergenceMonitor monitor(config.divergence);

  std::int64_t window_beta = 0;
  std::int64_t window_alpha = 0;
  std::int64_t window_len = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::int64_t it = 1; it <= config.n_iter; ++it) {
    MonitorPoint point{it, nan, nan, nan};
    try {
      sampler.sweep(it);
      const UtilityTensor v = sampler.utilities();
      point.max_abs_v = max_abs_utility(v);
      point.max_abs_param = max_abs_parameter(sampler.state());
      point.mean_chosen_prob =
          std::isfinite(point.max_abs_v) ? mean_chosen_probability(fit_data, v) : nan;
    } catch (const std::exception&) {
      // Numerical breakdown inside the sweep: recorded as non-finite below.
    }
    const double beta_rate = fit_data.K > 0 ? static_cast<double>(sampler.last_beta_accepts()) /
                                                  static_cast<double>(fit_data.N)
                                            : nan;
    const double alpha_rate = static_cast<double>(sampler.last_alpha_accepts());
    chain.monitors["log_likelihood"].push_back(sampler.log_likelihood());
    chain.monitors["max_abs_v"].push_back(point.max_abs_v);
    chain.monitors["mean_chosen_prob"].push_back(point.mean_chosen_prob);
    chain.monitors["max_abs_param"].push_back(point.max_abs_param);
    chain.monitors["accept_beta"].push_back(beta_rate);
    chain.monitors["accept_alpha"].push_back(alpha_rate);
    chain.monitors["rho_beta"].push_back(sampler.rho_beta());
    chain.monitors["rho_alpha"].push_back(sampler.rho_alpha());

    if (monitor.observe(point)) break;

    if (it <= config.n_burn) {
      window_beta += sampler.last_beta_accepts();
      window_alpha += sampler.last_alpha_accepts();
      ++window_len;
      if (it % config.adapt_every == 0) {
        sampler.adapt(static_cast<double>(window_beta) /
                          static_cast<double>(window_len * std::max(fit_data.N, 1)),
                      static_cast<double>(window_alpha) / static_cast<double>(window_len));
        window_beta = window_alpha = window_len = 0;
      }
    } else if ((it - config.n_burn) % config.thin == 0) {
      const auto values = flatten(sampler.state(), config.store_beta);
      chain.add_draw(it, values);
    }
  }

  result.divergence = monitor.report();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  chain.meta["sampler"] = "mh";
  chain.meta["seed"] = config.seed;
  chain.meta["chain"] = config.chain;
  chain.meta["dataset_digest"] = data.digest();
  chain.meta["final_rho_beta"] = sampler.rho_beta();
  chain.meta["final_rho_alpha"] = sampler.rho_alpha();
  return result;
}

}  // namespace mixlogit
