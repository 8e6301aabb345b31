#include "mixlogit/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mixlogit/errors.hpp"

namespace mixlogit {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text) {
  double x = 0.0;
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw InvalidInput("not a number: '" + std::string(text) + "'");
  }
  return x;
}

namespace {

long long parse_int(std::string_view text) {
  long long x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw InvalidInput("not an integer: '" + std::string(text) + "'");
  }
  return x;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Splits into lines, dropping one trailing newline and any '\r'.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

[[noreturn]] void row_error(const std::string& source, std::size_t line, const std::string& what) {
  throw InvalidInput(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string dataset_to_csv(const ChoiceDataset& data) {
  data.validate();
  std::string out = "n,t,alt,chosen";
  for (int l = 0; l < data.L; ++l) out += ",xf_" + std::to_string(l + 1);
  for (int k = 0; k < data.K; ++k) out += ",xr_" + std::to_string(k + 1);
  out += '\n';
  for (int n = 0; n < data.N; ++n) {
    for (int t = 0; t < data.T; ++t) {
      for (int j = 0; j < data.J; ++j) {
        out += std::to_string(n + 1);
        out += ',';
        out += std::to_string(t + 1);
        out += ',';
        out += std::to_string(j + 1);
        out += data.choice(n, t) == j ? ",1" : ",0";
        const std::size_t c = data.cell(n, t, j);
        for (int l = 0; l < data.L; ++l) {
          out += ',';
          out += format_double(data.xf[c * data.L + l]);
        }
        for (int k = 0; k < data.K; ++k) {
          out += ',';
          out += format_double(data.xr[c * data.K + k]);
        }
        out += '\n';
      }
    }
  }
  return out;
}

ChoiceDataset dataset_from_csv(std::string_view text, const std::string& source) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw InvalidInput(source + ": empty dataset file");
  const auto header = split_fields(lines[0]);
  if (header.size() < 4 || header[0] != "n" || header[1] != "t" || header[2] != "alt" ||
      header[3] != "chosen") {
    row_error(source, 1, "header must start with n,t,alt,chosen");
  }
  int L = 0;
  int K = 0;
  for (std::size_t i = 4; i < header.size(); ++i) {
    const std::string expect_f = "xf_" + std::to_string(L + 1);
    const std::string expect_r = "xr_" + std::to_string(K + 1);
    if (K == 0 && header[i] == expect_f) {
      ++L;
    } else if (header[i] == expect_r) {
      ++K;
    } else {
      row_error(source, 1, "unexpected column '" + std::string(header[i]) + "'");
    }
  }
  const std::size_t width = 4 + static_cast<std::size_t>(L + K);

  struct Row {
    long long n, t, alt, chosen;
  };
  std::vector<Row> rows;
  std::vector<double> xf;
  std::vector<double> xr;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != width) {
      row_error(source, i + 1,
                "expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
    }
    try {
      rows.push_back({parse_int(f[0]), parse_int(f[1]), parse_int(f[2]), parse_int(f[3])});
      for (int l = 0; l < L; ++l) xf.push_back(parse_double(f[4 + l]));
      for (int k = 0; k < K; ++k) xr.push_back(parse_double(f[4 + L + k]));
    } catch (const InvalidInput& e) {
      row_error(source, i + 1, e.what());
    }
  }
  if (rows.empty()) throw InvalidInput(source + ": dataset has no rows");

  long long J = 0;
  while (J < static_cast<long long>(rows.size()) && rows[J].n == 1 && rows[J].t == 1) ++J;
  long long T = 0;
  for (std::size_t i = 0; i < rows.size() && rows[i].n == 1; i += static_cast<std::size_t>(J)) ++T;
  if (J < 1 || T < 1 || rows.size() % static_cast<std::size_t>(J * T) != 0) {
    throw InvalidInput(source + ": rows do not form a balanced (n, t, alt) panel");
  }
  const long long N = static_cast<long long>(rows.size()) / (J * T);
  ChoiceDataset data = ChoiceDataset::zeros(static_cast<int>(N), static_cast<int>(T),
                                            static_cast<int>(J), L, K);
  data.xf = std::move(xf);
  data.xr = std::move(xr);
  std::size_t i = 0;
  for (long long n = 0; n < N; ++n) {
    for (long long t = 0; t < T; ++t) {
      int chosen = -1;
      for (long long j = 0; j < J; ++j, ++i) {
        const Row& r = rows[i];
        if (r.n != n + 1 || r.t != t + 1 || r.alt != j + 1) {
          row_error(source, i + 2,
                    "expected (n,t,alt) = (" + std::to_string(n + 1) + "," +
                        std::to_string(t + 1) + "," + std::to_string(j + 1) + ")");
        }
        if (r.chosen != 0 && r.chosen != 1) row_error(source, i + 2, "chosen must be 0 or 1");
        if (r.chosen == 1) {
          if (chosen >= 0) row_error(source, i + 2, "more than one chosen alternative");
          chosen = static_cast<int>(j);
        }
      }
      if (chosen < 0) row_error(source, i + 1, "no chosen alternative");
      data.y[data.obs(static_cast<int>(n), static_cast<int>(t))] = chosen;
    }
  }
  data.validate();
  return data;
}

void write_dataset_csv(const fs::path& path, const ChoiceDataset& data) {
  write_text(path, dataset_to_csv(data));
}

ChoiceDataset read_dataset_csv(const fs::path& path) {
  return dataset_from_csv(read_text(path), path.string());
}

std::string chain_to_csv(const Chain& chain) {
  std::string out = "iter";
  for (const auto& n : chain.names) out += "," + n;
  out += '\n';
  for (std::size_t i = 0; i < chain.n_draws(); ++i) {
    out += std::to_string(chain.iterations[i]);
    for (double x : chain.row(i)) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

Chain chain_from_csv(std::string_view text, const std::string& source) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw InvalidInput(source + ": empty chain file");
  const auto header = split_fields(lines[0]);
  if (header.empty() || header[0] != "iter") row_error(source, 1, "header must start with iter");
  Chain chain;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < header.size(); ++i) {
    std::string name(header[i]);
    if (name.empty() || !seen.insert(name).second) {
      row_error(source, 1, "empty or duplicate column '" + name + "'");
    }
    chain.names.push_back(std::move(name));
  }
  std::vector<double> row(chain.names.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    if (f.size() != header.size()) {
      row_error(source, i + 1, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(f.size()));
    }
    try {
      const long long iter = parse_int(f[0]);
      for (std::size_t p = 0; p < row.size(); ++p) row[p] = parse_double(f[p + 1]);
      chain.add_draw(iter, row);
    } catch (const InvalidInput& e) {
      row_error(source, i + 1, e.what());
    }
  }
  return chain;
}

void write_chain_csv(const fs::path& path, const Chain& chain) {
  write_text(path, chain_to_csv(chain));
}

Chain read_chain_csv(const fs::path& path) { return chain_from_csv(read_text(path), path.string()); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw InvalidInput(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw InvalidInput(where + ": unknown key '" + item.key() + "'");
  }
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw InvalidInput(where + ": expected an array of rows");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput(where + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) throw InvalidInput(where + ": non-numeric entry");
      m(r, c) = x.get<double>();
    }
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput(where + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

namespace {

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void get_opt(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get_as<T>(obj, key, where);
}

// Matrix with the given column count; an empty array or a missing key gives
// rows x cols zeros only when cols == 0.
Eigen::MatrixXd shaped(const json& obj, const char* key, int rows, int cols,
                       const std::string& where) {
  if (!obj.contains(key)) {
    if (rows * cols == 0) return Eigen::MatrixXd::Zero(rows, cols);
    throw InvalidInput(where + ": missing '" + key + "'");
  }
  const json& j = obj.at(key);
  Eigen::MatrixXd m;
  if (j.is_array() && !j.empty() && j[0].is_number()) {
    const Eigen::VectorXd v = vector_from_json(j, where + "." + key);
    m = rows == 1 ? Eigen::MatrixXd(v.transpose()) : Eigen::MatrixXd(v);
  } else {
    m = matrix_from_json(j, where + "." + key);
  }
  if (rows * cols == 0 && m.size() == 0) return Eigen::MatrixXd::Zero(rows, cols);
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidInput(where + "." + key + ": expected " + std::to_string(rows) + " x " +
                       std::to_string(cols));
  }
  return m;
}

}  // namespace

json to_json(const ScenarioSpec& s) {
  return {{"name", s.name},
          {"model_kind", to_string(s.model_kind)},
          {"N", s.N},
          {"T", s.T},
          {"J", s.J},
          {"L", s.L},
          {"K", s.K},
          {"alpha", to_json(s.alpha)},
          {"zeta", to_json(s.zeta)},
          {"omega", to_json(s.omega)},
          {"covariate_law", to_string(s.covariate_law)},
          {"seed", s.seed}};
}

ScenarioSpec scenario_from_json(const json& j) {
  const std::string where = "scenario";
  require_keys(j, {"name", "model_kind", "N", "T", "J", "L", "K", "alpha", "zeta", "omega",
                   "covariate_law", "seed"},
               where);
  ScenarioSpec s;
  get_opt(j, "name", s.name, where);
  s.model_kind = parse_model_kind(get_as<std::string>(j, "model_kind", where));
  s.N = get_as<int>(j, "N", where);
  s.T = get_as<int>(j, "T", where);
  s.J = get_as<int>(j, "J", where);
  s.L = get_as<int>(j, "L", where);
  s.K = get_as<int>(j, "K", where);
  const int rows = s.model_kind == ModelKind::kMmnlGeneric ? 1 : s.J;
  s.alpha = shaped(j, "alpha", rows, s.L, where);
  s.zeta = shaped(j, "zeta", rows, s.K, where);
  s.omega = shaped(j, "omega", s.K, s.K, where);
  if (j.contains("covariate_law")) {
    s.covariate_law = parse_covariate_law(get_as<std::string>(j, "covariate_law", where));
  }
  get_opt(j, "seed", s.seed, where);
  s.validate();
  return s;
}

json to_json(const HyperParameters& h) {
  return {{"lambda0", to_json(h.lambda0)}, {"xi0", to_json(h.xi0)}, {"mu0", to_json(h.mu0)},
          {"sigma0", to_json(h.sigma0)},   {"nu", h.nu},            {"A", to_json(h.A)}};
}

HyperParameters hyper_from_json(const json& j, int L, int K) {
  const std::string where = "hyper";
  require_keys(j, {"lambda0", "xi0", "mu0", "sigma0", "nu", "A"}, where);
  HyperParameters h = HyperParameters::defaults(L, K);
  if (j.contains("lambda0")) h.lambda0 = vector_from_json(j.at("lambda0"), where + ".lambda0");
  if (j.contains("xi0")) h.xi0 = shaped(j, "xi0", L, L, where);
  if (j.contains("mu0")) h.mu0 = vector_from_json(j.at("mu0"), where + ".mu0");
  if (j.contains("sigma0")) h.sigma0 = shaped(j, "sigma0", K, K, where);
  get_opt(j, "nu", h.nu, where);
  if (j.contains("A")) {
    const json& a = j.at("A");
    if (a.is_number()) {
      h.A = Eigen::VectorXd::Constant(K, a.get<double>());
    } else {
      h.A = vector_from_json(a, where + ".A");
    }
  }
  h.validate(L, K);
  return h;
}

json to_json(const TrueParams& truth, bool with_beta) {
  json out;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        out["alpha"] = to_json(Eigen::MatrixXd(s.alpha));
        out["zeta"] = to_json(Eigen::MatrixXd(s.zeta));
        out["omega"] = to_json(s.omega);
        if (with_beta) {
          if constexpr (std::is_same_v<S, GenericParamState>) {
            out["beta"] = to_json(s.beta);
          } else {
            json blocks = json::array();
            for (const auto& b : s.beta) blocks.push_back(to_json(b));
            out["beta"] = blocks;
          }
        }
      },
      truth);
  return out;
}

json to_json(const DivergenceThresholds& t) {
  return {{"v_max", t.v_max}, {"param_max", t.param_max}, {"window", t.window}};
}

DivergenceThresholds divergence_thresholds_from_json(const json& j) {
  const std::string where = "sampler.divergence";
  require_keys(j, {"v_max", "param_max", "window"}, where);
  DivergenceThresholds t;
  get_opt(j, "v_max", t.v_max, where);
  get_opt(j, "param_max", t.param_max, where);
  get_opt(j, "window", t.window, where);
  if (!(t.v_max > 0.0) || !(t.param_max > 0.0) || t.window < 2) {
    throw InvalidInput(where + ": thresholds must be positive and window >= 2");
  }
  return t;
}

json to_json(const MhConfig& c) {
  return {{"kind", "mh"},
          {"n_iter", c.n_iter},
          {"n_burn", c.n_burn},
          {"thin", c.thin},
          {"target_accept", c.target_accept},
          {"rho_beta", c.rho_beta},
          {"rho_alpha", c.rho_alpha},
          {"adapt_every", c.adapt_every},
          {"adapt_factor", c.adapt_factor},
          {"seed", c.seed},
          {"chain", c.chain},
          {"threads", c.threads},
          {"zeta_update", to_string(c.zeta_update)},
          {"expand_alternative_specific", c.expand_alternative_specific},
          {"store_beta", c.store_beta},
          {"divergence", to_json(c.divergence)},
          {"mutation", to_string(c.mutation)}};
}

MhConfig mh_config_from_json(const json& j) {
  const std::string where = "sampler";
  require_keys(j, {"kind", "n_iter", "n_burn", "thin", "target_accept", "rho_beta", "rho_alpha",
                   "adapt_every", "adapt_factor", "seed", "chain", "threads", "zeta_update",
                   "expand_alternative_specific", "store_beta", "divergence", "mutation"},
               where);
  MhConfig c;
  get_opt(j, "n_iter", c.n_iter, where);
  get_opt(j, "n_burn", c.n_burn, where);
  get_opt(j, "thin", c.thin, where);
  get_opt(j, "target_accept", c.target_accept, where);
  get_opt(j, "rho_beta", c.rho_beta, where);
  get_opt(j, "rho_alpha", c.rho_alpha, where);
  get_opt(j, "adapt_every", c.adapt_every, where);
  get_opt(j, "adapt_factor", c.adapt_factor, where);
  get_opt(j, "seed", c.seed, where);
  get_opt(j, "chain", c.chain, where);
  get_opt(j, "threads", c.threads, where);
  if (j.contains("zeta_update")) {
    c.zeta_update = parse_zeta_update(get_as<std::string>(j, "zeta_update", where));
  }
  get_opt(j, "expand_alternative_specific", c.expand_alternative_specific, where);
  get_opt(j, "store_beta", c.store_beta, where);
  if (j.contains("divergence")) c.divergence = divergence_thresholds_from_json(j.at("divergence"));
  if (j.contains("mutation")) c.mutation = parse_mutation(get_as<std::string>(j, "mutation", where));
  c.validate();
  return c;
}

json to_json(const PgConfig& c) {
  return {{"kind", "pg"},
          {"n_iter", c.n_iter},
          {"n_burn", c.n_burn},
          {"thin", c.thin},
          {"seed", c.seed},
          {"chain", c.chain},
          {"threads", c.threads},
          {"zeta_update", to_string(c.zeta_update)},
          {"phi_schedule", to_string(c.phi_schedule)},
          {"store_beta", c.store_beta},
          {"check_freshness", c.check_freshness},
          {"divergence", to_json(c.divergence)},
          {"mutation", to_string(c.mutation)}};
}

PgConfig pg_config_from_json(const json& j) {
  const std::string where = "sampler";
  require_keys(j, {"kind", "n_iter", "n_burn", "thin", "seed", "chain", "threads", "zeta_update",
                   "phi_schedule", "store_beta", "check_freshness", "divergence", "mutation"},
               where);
  PgConfig c;
  get_opt(j, "n_iter", c.n_iter, where);
  get_opt(j, "n_burn", c.n_burn, where);
  get_opt(j, "thin", c.thin, where);
  get_opt(j, "seed", c.seed, where);
  get_opt(j, "chain", c.chain, where);
  get_opt(j, "threads", c.threads, where);
  if (j.contains("zeta_update")) {
    c.zeta_update = parse_zeta_update(get_as<std::string>(j, "zeta_update", where));
  }
  if (j.contains("phi_schedule")) {
    c.phi_schedule = parse_phi_schedule(get_as<std::string>(j, "phi_schedule", where));
  }
  get_opt(j, "store_beta", c.store_beta, where);
  get_opt(j, "check_freshness", c.check_freshness, where);
  if (j.contains("divergence")) c.divergence = divergence_thresholds_from_json(j.at("divergence"));
  if (j.contains("mutation")) c.mutation = parse_mutation(get_as<std::string>(j, "mutation", where));
  c.validate();
  return c;
}

json to_json(const Summary& s) {
  json out = json::array();
  for (const auto& p : s.params) {
    out.push_back({{"name", p.name},
                   {"mean", p.mean},
                   {"sd", p.sd},
                   {"q025", p.q025},
                   {"q50", p.q50},
                   {"q975", p.q975},
                   {"ess", p.ess},
                   {"ess_degenerate", p.ess_degenerate},
                   {"mcse", p.mcse()}});
  }
  return out;
}

json to_json(const RecoveryReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"name", row.name},
                    {"truth", row.truth},
                    {"mean", row.mean},
                    {"bias", row.bias},
                    {"abs_z", row.abs_z},
                    {"covered", row.covered}});
  }
  return {{"rows", rows}, {"rmse", r.rmse}};
}

json to_json(const DivergenceReport& r) {
  json trace = {{"iteration", json::array()},
                {"max_abs_v", json::array()},
                {"mean_chosen_prob", json::array()},
                {"max_abs_param", json::array()}};
  // JSON has no inf/nan; those become null.
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  for (const auto& p : r.trace) {
    trace["iteration"].push_back(p.iteration);
    trace["max_abs_v"].push_back(num(p.max_abs_v));
    trace["mean_chosen_prob"].push_back(num(p.mean_chosen_prob));
    trace["max_abs_param"].push_back(num(p.max_abs_param));
  }
  json out = {{"triggered", r.triggered},
              {"iteration", r.iteration},
              {"reason", to_string(r.reason)},
              {"window", trace}};
  if (r.triggered) {
    const TraceStats st = divergence_trace_stats(r);
    out["prob_chosen_tail_mean"] = num(st.prob_chosen_tail_mean);
    out["v_growth_slope"] = num(st.v_growth_slope);
  }
  return out;
}

std::string comparison_to_csv(const Comparison& c) {
  std::string out = "name_a,name_b,mean_a,mean_b,se_a,se_b,z,unmapped\n";
  for (const auto& r : c.rows) {
    out += r.name_a + "," + r.name_b + "," + format_double(r.mean_a) + "," +
           format_double(r.mean_b) + "," + format_double(r.se_a) + "," + format_double(r.se_b) +
           "," + format_double(r.z) + ",\n";
  }
  for (const auto& u : c.unmapped) out += ",,,,,,," + u + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> param_map_from_json(const json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  if (j.is_object()) {
    for (const auto& item : j.items()) {
      if (!item.value().is_string()) throw InvalidInput("map: values must be names");
      out.emplace_back(item.key(), item.value().get<std::string>());
    }
  } else if (j.is_array()) {
    for (const auto& pair : j) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw InvalidInput("map: entries must be [name_a, name_b]");
      }
      out.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  } else {
    throw InvalidInput("map: expected an object or an array of pairs");
  }
  return out;
}

std::string geweke_to_csv(const GewekeResult& r) {
  std::string out = "name,mean_marginal,mean_successive,se_marginal,se_successive,z\n";
  for (const auto& row : r.rows) {
    out += row.name + "," + format_double(row.mean_marginal) + "," +
           format_double(row.mean_successive) + "," + format_double(row.se_marginal) + "," +
           format_double(row.se_successive) + "," + format_double(row.z) + "\n";
  }
  return out;
}

GewekeToySpec geweke_toy_from_json(const json& j) {
  const std::string where = "toy-spec";
  require_keys(j, {"N", "T", "J", "L", "K", "covariate_law", "hyper", "seed", "rho_beta",
                   "rho_alpha", "zeta_update", "phi_schedule", "prior_alt_specific"},
               where);
  GewekeToySpec s = GewekeToySpec::defaults(
      j.value("N", 10), j.value("T", 3), j.value("J", 2), j.value("L", 1), j.value("K", 1));
  if (j.contains("covariate_law")) {
    s.covariate_law = parse_covariate_law(get_as<std::string>(j, "covariate_law", where));
  }
  if (j.contains("hyper")) {
    // Unspecified entries keep the toy defaults rather than the fitting defaults.
    json merged = to_json(s.hyper);
    require_keys(j.at("hyper"), {"lambda0", "xi0", "mu0", "sigma0", "nu", "A"}, where + ".hyper");
    merged.update(j.at("hyper"));
    s.hyper = hyper_from_json(merged, s.L, s.K);
  }
  get_opt(j, "seed", s.seed, where);
  get_opt(j, "rho_beta", s.rho_beta, where);
  get_opt(j, "rho_alpha", s.rho_alpha, where);
  if (j.contains("zeta_update")) {
    s.zeta_update = parse_zeta_update(get_as<std::string>(j, "zeta_update", where));
  }
  if (j.contains("phi_schedule")) {
    s.phi_schedule = parse_phi_schedule(get_as<std::string>(j, "phi_schedule", where));
  }
  get_opt(j, "prior_alt_specific", s.prior_alt_specific, where);
  s.validate();
  return s;
}

}  // namespace mixlogit
