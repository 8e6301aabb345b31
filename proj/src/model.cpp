#include "mixlogit/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"

namespace mixlogit {

ChoiceDataset ChoiceDataset::zeros(int N, int T, int J, int L, int K) {
  if (N <= 0 || T <= 0 || J <= 0 || L < 0 || K < 0) {
    throw InvalidInput("ChoiceDataset: N, T, J must be positive and L, K non-negative");
  }
  ChoiceDataset d;
  d.N = N;
  d.T = T;
  d.J = J;
  d.L = L;
  d.K = K;
  const std::size_t cells = static_cast<std::size_t>(N) * T * J;
  d.xf.assign(cells * L, 0.0);
  d.xr.assign(cells * K, 0.0);
  d.y.assign(static_cast<std::size_t>(N) * T, 0);
  return d;
}

void ChoiceDataset::validate() const {
  if (N <= 0 || T <= 0 || J <= 0 || L < 0 || K < 0) {
    throw InvalidInput("ChoiceDataset: invalid dimensions");
  }
  const std::size_t cells = static_cast<std::size_t>(N) * T * J;
  if (xf.size() != cells * L || xr.size() != cells * K ||
      y.size() != static_cast<std::size_t>(N) * T) {
    throw InvalidInput("ChoiceDataset: storage size does not match N, T, J, L, K");
  }
  for (std::size_t i = 0; i < xf.size(); ++i) {
    if (!std::isfinite(xf[i])) throw InvalidInput("ChoiceDataset: non-finite fixed covariate");
  }
  for (std::size_t i = 0; i < xr.size(); ++i) {
    if (!std::isfinite(xr[i])) throw InvalidInput("ChoiceDataset: non-finite random covariate");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= J) {
      throw InvalidInput("ChoiceDataset: choice out of range at observation " +
                         std::to_string(i));
    }
  }
}

std::string ChoiceDataset::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const int dims[5] = {N, T, J, L, K};
  feed(dims, sizeof(dims));
  feed(xf.data(), xf.size() * sizeof(double));
  feed(xr.data(), xr.size() * sizeof(double));
  feed(y.data(), y.size() * sizeof(int));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

HyperParameters HyperParameters::defaults(int L, int K) {
  HyperParameters h;
  h.lambda0 = Eigen::VectorXd::Zero(L);
  h.xi0 = 10.0 * Eigen::MatrixXd::Identity(L, L);
  h.mu0 = Eigen::VectorXd::Zero(K);
  h.sigma0 = 10.0 * Eigen::MatrixXd::Identity(K, K);
  h.nu = 2.0;
  h.A = Eigen::VectorXd::Constant(K, 1e3);
  return h;
}

void HyperParameters::validate(int L, int K) const {
  if (lambda0.size() != L || xi0.rows() != L || xi0.cols() != L) {
    throw InvalidInput("HyperParameters: lambda0/xi0 must match L = " + std::to_string(L));
  }
  if (mu0.size() != K || sigma0.rows() != K || sigma0.cols() != K || A.size() != K) {
    throw InvalidInput("HyperParameters: mu0/sigma0/A must match K = " + std::to_string(K));
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("HyperParameters: nu must be > 0");
  for (Eigen::Index k = 0; k < A.size(); ++k) {
    if (!(A(k) > 0.0) || !std::isfinite(A(k))) {
      throw InvalidInput("HyperParameters: A must be positive");
    }
  }
}

UtilityTensor representative_utility(const ChoiceDataset& data, const GenericParamState& params) {
  if (params.alpha.size() != data.L || params.beta.cols() != data.K ||
      (data.K > 0 && params.beta.rows() != data.N)) {
    throw InvalidInput("representative_utility: parameter dimensions do not match dataset");
  }
  UtilityTensor v(data.N, data.T, data.J);
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      for (int j = 0; j < data.J; ++j) {
        double u = data.fixed_row(n, t, j).dot(params.alpha);
        if (data.K > 0) u += data.random_row(n, t, j).dot(params.beta.row(n).transpose());
        v(n, t, j) = u;
      }
    }
  }
  return v;
}

UtilityTensor representative_utility(const ChoiceDataset& data,
                                     const AltSpecificParamState& params) {
  if (params.alpha.rows() != data.J || params.alpha.cols() != data.L) {
    throw InvalidInput("representative_utility: alpha must be J x L");
  }
  if (data.K > 0 && static_cast<int>(params.beta.size()) != data.J) {
    throw InvalidInput("representative_utility: beta must hold J blocks");
  }
  UtilityTensor v(data.N, data.T, data.J);
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      for (int j = 0; j < data.J; ++j) {
        double u = data.fixed_row(n, t, j).dot(params.alpha.row(j).transpose());
        if (data.K > 0) {
          u += data.random_row(n, t, j).dot(params.beta[j].row(n).transpose());
        }
        v(n, t, j) = u;
      }
    }
  }
  return v;
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sum_exp_excluding(std::span<const double> v, std::size_t skip) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k != skip) m = std::max(m, v[k]);
  }
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k != skip) s += std::exp(v[k] - m);
  }
  return m + std::log(s);
}

Eigen::VectorXd mnl_probabilities(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("mnl_probabilities: empty utility row");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("mnl_probabilities: non-finite utility");
    m = std::max(m, x);
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(v.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    p(static_cast<Eigen::Index>(j)) = std::exp(v[j] - m);
    s += p(static_cast<Eigen::Index>(j));
  }
  return p / s;
}

double sequence_log_likelihood(const ChoiceDataset& data, const UtilityTensor& v, int n) {
  if (n < 0 || n >= data.N) throw InvalidInput("sequence_log_likelihood: n out of range");
  double ll = 0.0;
  for (int t = 0; t < data.T; ++t) {
    const auto row = v.row(n, t);
    ll += row[static_cast<std::size_t>(data.choice(n, t))] - log_sum_exp(row);
  }
  return ll;
}

double sequence_log_likelihood(const ChoiceDataset& data, const GenericParamState& params,
                               int n) {
  if (n < 0 || n >= data.N) throw InvalidInput("sequence_log_likelihood: n out of range");
  std::vector<double> row(static_cast<std::size_t>(data.J));
  double ll = 0.0;
  for (int t = 0; t < data.T; ++t) {
    for (int j = 0; j < data.J; ++j) {
      double u = data.fixed_row(n, t, j).dot(params.alpha);
      if (data.K > 0) u += data.random_row(n, t, j).dot(params.beta.row(n).transpose());
      row[static_cast<std::size_t>(j)] = u;
    }
    ll += row[static_cast<std::size_t>(data.choice(n, t))] - log_sum_exp(row);
  }
  return ll;
}

double total_log_likelihood(const ChoiceDataset& data, const UtilityTensor& v) {
  double ll = 0.0;
  for (int n = 0; n < data.N; ++n) ll += sequence_log_likelihood(data, v, n);
  return ll;
}

LogitReduction compute_L_eta(const UtilityTensor& v, int j) {
  if (v.J < 2) throw InvalidInput("compute_L_eta: needs at least two alternatives");
  if (j < 0 || j >= v.J) throw InvalidInput("compute_L_eta: alternative out of range");
  LogitReduction out{Eigen::MatrixXd(v.N, v.T), Eigen::MatrixXd(v.N, v.T)};
  for (int n = 0; n < v.N; ++n) {
    for (int t = 0; t < v.T; ++t) {
      const double l = log_sum_exp_excluding(v.row(n, t), static_cast<std::size_t>(j));
      out.L(n, t) = l;
      out.eta(n, t) = v(n, t, j) - l;
    }
  }
  return out;
}

double kappa(int y_indicator) {
  if (y_indicator != 0 && y_indicator != 1) {
    throw InvalidInput("kappa: indicator must be 0 or 1, got " + std::to_string(y_indicator));
  }
  return y_indicator - 0.5;
}

PgIdentityCheck pg_identity_check(double eta, int y, std::int64_t n_draws, RngStream& stream) {
  const double k = kappa(y);
  if (n_draws < 2) throw InvalidInput("pg_identity_check: need at least two draws");
  PgIdentityCheck out;
  // e^{eta y} / (1 + e^eta) evaluated without overflow.
  out.lhs = std::exp(eta * y - std::log1p(std::exp(-std::abs(eta))) - std::max(eta, 0.0));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t i = 0; i < n_draws; ++i) {
    const double w = sample_polya_gamma(0.0, stream);
    const double g = std::exp(-0.5 * eta * eta * w);
    const double delta = g - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (g - mean);
  }
  const double prefactor = 0.5 * std::exp(k * eta);
  const double var = m2 / static_cast<double>(n_draws - 1);
  out.rhs_estimate = prefactor * mean;
  out.std_error = prefactor * std::sqrt(var / static_cast<double>(n_draws));
  return out;
}

ChoiceDataset expand_alternative_specific(const ChoiceDataset& data) {
  ChoiceDataset out = ChoiceDataset::zeros(data.N, data.T, data.J, data.L * data.J,
                                           data.K * data.J);
  out.y = data.y;
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      for (int j = 0; j < data.J; ++j) {
        for (int l = 0; l < data.L; ++l) {
          out.fixed_at(n, t, j, j * data.L + l) = data.xf[data.cell(n, t, j) * data.L + l];
        }
        for (int k = 0; k < data.K; ++k) {
          out.random_at(n, t, j, j * data.K + k) = data.xr[data.cell(n, t, j) * data.K + k];
        }
      }
    }
  }
  return out;
}

double max_abs_utility(const UtilityTensor& v) {
  double m = 0.0;
  for (double x : v.values) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

double mean_chosen_probability(const ChoiceDataset& data, const UtilityTensor& v) {
  double s = 0.0;
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      const auto row = v.row(n, t);
      s += std::exp(row[static_cast<std::size_t>(data.choice(n, t))] - log_sum_exp(row));
    }
  }
  return s / (static_cast<double>(data.N) * data.T);
}

}  // namespace mixlogit
