#include "mixlogit/cli.hpp"

#include <future>
#include <iostream>

#include "CLI11.hpp"
#include "mixlogit/diagnostics.hpp"
#include "mixlogit/errors.hpp"
#include "mixlogit/geweke.hpp"
#include "mixlogit/io.hpp"
#include "mixlogit/selftest.hpp"

namespace mixlogit {

namespace fs = std::filesystem;

namespace {

std::string idx(int i) { return "[" + std::to_string(i + 1) + "]"; }

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_absolute() ? p : base / p;
}

std::string path_field(const json& doc, const char* key) {
  if (!doc.at(key).is_string()) throw InvalidInput(std::string("config.") + key + ": expected a path");
  return doc.at(key).get<std::string>();
}

}  // namespace

FitConfig parse_fit_config(const json& doc, const fs::path& base_dir) {
  require_keys(doc, {"scenario", "dataset-path", "truth-path", "hyper", "sampler", "output-dir"},
               "config");
  FitConfig c;
  c.echo = doc;
  const bool has_scenario = doc.contains("scenario");
  const bool has_dataset = doc.contains("dataset-path");
  if (has_scenario == has_dataset) {
    throw InvalidInput("config: exactly one of 'scenario' and 'dataset-path' is required");
  }
  if (has_scenario) {
    const json& s = doc.at("scenario");
    c.scenario = s.is_string() ? preset(s.get<std::string>()) : scenario_from_json(s);
  } else {
    c.dataset_path = resolve(path_field(doc, "dataset-path"), base_dir);
  }
  if (doc.contains("truth-path")) {
    if (has_scenario) throw InvalidInput("config: 'truth-path' only applies with 'dataset-path'");
    c.truth_path = resolve(path_field(doc, "truth-path"), base_dir);
  }
  if (doc.contains("hyper")) {
    c.hyper = doc.at("hyper");
    require_keys(c.hyper, {"lambda0", "xi0", "mu0", "sigma0", "nu", "A"}, "hyper");
  }
  if (!doc.contains("sampler")) throw InvalidInput("config: missing 'sampler'");
  const json& s = doc.at("sampler");
  if (!s.is_object() || !s.contains("kind") || !s.at("kind").is_string()) {
    throw InvalidInput("config.sampler: 'kind' (mh|pg) is required");
  }
  const std::string kind = s.at("kind").get<std::string>();
  if (kind == "mh") {
    c.sampler = FitSampler::kMh;
    c.mh = mh_config_from_json(s);
    // Alternative-specific MNL truth is only representable through the
    // expanded design.
    if (!s.contains("expand_alternative_specific") && c.scenario &&
        c.scenario->model_kind == ModelKind::kMnl) {
      c.mh.expand_alternative_specific = true;
    }
  } else if (kind == "pg") {
    c.sampler = FitSampler::kPg;
    c.pg = pg_config_from_json(s);
  } else {
    throw InvalidInput("config.sampler.kind: expected mh or pg, got '" + kind + "'");
  }
  if (!doc.contains("output-dir")) throw InvalidInput("config: missing 'output-dir'");
  c.output_dir = resolve(path_field(doc, "output-dir"), base_dir);
  return c;
}

std::vector<std::pair<std::string, double>> truth_pairs(ModelKind truth_kind,
                                                        const Eigen::MatrixXd& alpha,
                                                        const Eigen::MatrixXd& zeta,
                                                        const Eigen::MatrixXd& omega,
                                                        FitSampler sampler, bool expanded) {
  std::vector<std::pair<std::string, double>> out;
  const bool generic_truth = truth_kind == ModelKind::kMmnlGeneric;
  auto add_omega = [&]() {
    for (Eigen::Index k1 = 0; k1 < omega.rows(); ++k1) {
      for (Eigen::Index k2 = k1; k2 < omega.cols(); ++k2) {
        out.emplace_back("omega" + idx(static_cast<int>(k1)) + idx(static_cast<int>(k2)),
                         omega(k1, k2));
      }
    }
  };
  if (sampler == FitSampler::kPg) {
    for (Eigen::Index j = 0; j < alpha.rows(); ++j) {
      for (Eigen::Index l = 0; l < alpha.cols(); ++l) {
        out.emplace_back("alpha" + idx(static_cast<int>(j)) + idx(static_cast<int>(l)),
                         alpha(j, l));
      }
    }
    for (Eigen::Index j = 0; j < zeta.rows(); ++j) {
      for (Eigen::Index k = 0; k < zeta.cols(); ++k) {
        out.emplace_back("zeta" + idx(static_cast<int>(j)) + idx(static_cast<int>(k)), zeta(j, k));
      }
    }
    add_omega();
    return out;
  }
  if (generic_truth && !expanded) {
    for (Eigen::Index l = 0; l < alpha.cols(); ++l) {
      out.emplace_back("alpha" + idx(static_cast<int>(l)), alpha(0, l));
    }
    for (Eigen::Index k = 0; k < zeta.cols(); ++k) {
      out.emplace_back("zeta" + idx(static_cast<int>(k)), zeta(0, k));
    }
    add_omega();
  } else if (!generic_truth && expanded) {
    const Eigen::Index L = alpha.cols();
    const Eigen::Index K = zeta.cols();
    for (Eigen::Index j = 0; j < alpha.rows(); ++j) {
      for (Eigen::Index l = 0; l < L; ++l) {
        out.emplace_back("alpha" + idx(static_cast<int>(j * L + l)), alpha(j, l));
      }
    }
    for (Eigen::Index j = 0; j < zeta.rows(); ++j) {
      for (Eigen::Index k = 0; k < K; ++k) {
        out.emplace_back("zeta" + idx(static_cast<int>(j * K + k)), zeta(j, k));
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> cross_sampler_map(const ScenarioSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  if (spec.model_kind == ModelKind::kMmnlGeneric) {
    for (int l = 0; l < spec.L; ++l) out.emplace_back("alpha" + idx(l), "alpha[1]" + idx(l));
    for (int k = 0; k < spec.K; ++k) out.emplace_back("zeta" + idx(k), "zeta[1]" + idx(k));
    for (int k = 0; k < spec.K; ++k) out.emplace_back("omega" + idx(k) + idx(k), "omega" + idx(k) + idx(k));
  } else {
    for (int j = 0; j < spec.J; ++j) {
      for (int l = 0; l < spec.L; ++l) {
        out.emplace_back("alpha" + idx(j * spec.L + l), "alpha" + idx(j) + idx(l));
      }
    }
    for (int j = 0; j < spec.J; ++j) {
      for (int k = 0; k < spec.K; ++k) {
        out.emplace_back("zeta" + idx(j * spec.K + k), "zeta" + idx(j) + idx(k));
      }
    }
  }
  return out;
}

namespace {

struct Loaded {
  ChoiceDataset data;
  std::vector<std::pair<std::string, double>> truth;
  HyperParameters hyper;
};

Loaded load_inputs(const FitConfig& c) {
  Loaded in;
  const bool expanded = c.sampler == FitSampler::kMh && c.mh.expand_alternative_specific;
  if (c.scenario) {
    GeneratedData g = generate(*c.scenario);
    in.data = std::move(g.dataset);
    if (const auto* t = std::get_if<GenericParamState>(&g.truth)) {
      in.truth = truth_pairs(c.scenario->model_kind, t->alpha.transpose(), t->zeta.transpose(),
                             t->omega, c.sampler, expanded);
    } else {
      const auto& a = std::get<AltSpecificParamState>(g.truth);
      in.truth = truth_pairs(c.scenario->model_kind, a.alpha, a.zeta, a.omega, c.sampler, expanded);
    }
  } else {
    in.data = read_dataset_csv(c.dataset_path);
    if (!c.truth_path.empty()) {
      const json t = read_json(c.truth_path);
      const ScenarioSpec spec = scenario_from_json(t.at("scenario"));
      in.truth = truth_pairs(spec.model_kind, spec.alpha, spec.zeta, spec.omega, c.sampler, expanded);
    }
  }
  const int L = expanded ? in.data.L * in.data.J : in.data.L;
  const int K = expanded ? in.data.K * in.data.J : in.data.K;
  in.hyper = hyper_from_json(c.hyper, L, K);
  return in;
}

std::string suffixed(const std::string& stem, const std::string& ext, int chains, int c) {
  return chains > 1 ? stem + "_" + std::to_string(c + 1) + ext : stem + ext;
}

// Runs one chain and writes its artifacts; returns true on divergence.
bool fit_one(const FitConfig& c, const Loaded& in, int chains, int chain) {
  RunResult r;
  json sampler_echo;
  if (c.sampler == FitSampler::kMh) {
    MhConfig mh = c.mh;
    mh.chain = static_cast<std::uint64_t>(chain);
    sampler_echo = to_json(mh);
    r = run_mh(in.data, in.hyper, mh);
  } else {
    PgConfig pg = c.pg;
    pg.chain = static_cast<std::uint64_t>(chain);
    sampler_echo = to_json(pg);
    r = run_pg(in.data, in.hyper, pg);
  }

  json report;
  report["config"] = c.echo;
  report["sampler"] = sampler_echo;
  report["hyper"] = to_json(in.hyper);
  report["seed"] = c.sampler == FitSampler::kMh ? c.mh.seed : c.pg.seed;
  report["chain"] = chain;
  report["dataset_digest"] = in.data.digest();
  report["timing"] = {{"seconds", r.seconds}};
  report["meta"] = r.chain.meta;
  report["draws"] = r.chain.n_draws();
  if (r.chain.n_draws() >= kMinSummaryDraws) {
    const Summary s = summarize(r.chain);
    report["summary"] = to_json(s);
    if (!in.truth.empty()) report["recovery"] = to_json(recovery_report(s, in.truth));
  } else {
    report["summary"] = nullptr;
  }
  json monitors = json::object();
  for (const auto& [name, series] : r.chain.monitors) monitors[name] = series;
  report["monitors"] = monitors;
  report["divergence"] = {{"triggered", r.divergence.triggered},
                          {"iteration", r.divergence.iteration},
                          {"reason", to_string(r.divergence.reason)}};

  write_chain_csv(c.output_dir / suffixed("chain", ".csv", chains, chain), r.chain);
  write_json(c.output_dir / suffixed("report", ".json", chains, chain), report);
  if (r.divergence.triggered) {
    json d = to_json(r.divergence);
    d["config"] = c.echo;
    d["seed"] = report["seed"];
    d["chain"] = chain;
    write_json(c.output_dir / suffixed("divergence", ".json", chains, chain), d);
    std::cerr << "chain " << chain + 1 << ": divergence at iteration " << r.divergence.iteration
              << " (" << to_string(r.divergence.reason) << ")\n";
  }
  return r.divergence.triggered;
}

int cmd_gen(const std::string& preset_name, const std::string& spec_path, const fs::path& out,
            std::optional<std::uint64_t> seed, bool with_beta) {
  ScenarioSpec spec = preset_name.empty() ? scenario_from_json(read_json(spec_path)) : preset(preset_name);
  if (seed) spec.seed = *seed;
  spec.validate();
  const GeneratedData g = generate(spec);
  fs::create_directories(out);
  write_dataset_csv(out / "dataset.csv", g.dataset);
  json truth = {{"scenario", to_json(spec)}, {"seed", spec.seed}, {"truth", to_json(g.truth, with_beta)}};
  write_json(out / "truth.json", truth);
  json meta = {{"command", "gen"},
               {"preset", preset_name.empty() ? json(nullptr) : json(preset_name)},
               {"spec_path", spec_path.empty() ? json(nullptr) : json(spec_path)},
               {"seed", spec.seed},
               {"rows", static_cast<long long>(g.dataset.N) * g.dataset.T * g.dataset.J},
               {"dims", {{"N", g.dataset.N}, {"T", g.dataset.T}, {"J", g.dataset.J},
                         {"L", g.dataset.L}, {"K", g.dataset.K}}},
               {"dataset_digest", g.dataset.digest()}};
  write_json(out / "meta.json", meta);
  return kExitSuccess;
}

int cmd_fit(const fs::path& config_path, int chains) {
  if (chains < 1) throw InvalidInput("--chains must be at least 1");
  const FitConfig c = parse_fit_config(read_json(config_path), config_path.parent_path());
  const Loaded in = load_inputs(c);
  fs::create_directories(c.output_dir);
  std::vector<std::future<bool>> runs;
  for (int k = 0; k < chains; ++k) {
    runs.push_back(std::async(chains > 1 ? std::launch::async : std::launch::deferred,
                              [&, k] { return fit_one(c, in, chains, k); }));
  }
  bool diverged = false;
  for (auto& f : runs) diverged = f.get() || diverged;
  return diverged ? kExitDivergence : kExitSuccess;
}

int cmd_compare(const fs::path& a, const fs::path& b, const fs::path& map, const fs::path& out) {
  const Chain ca = read_chain_csv(a);
  const Chain cb = read_chain_csv(b);
  const Comparison cmp = compare_chains(ca, cb, param_map_from_json(read_json(map)));
  write_text(out, comparison_to_csv(cmp));
  if (!cmp.unmapped.empty()) {
    std::cerr << "warning: " << cmp.unmapped.size() << " unmapped parameter(s):";
    for (const auto& u : cmp.unmapped) std::cerr << ' ' << u;
    std::cerr << '\n';
  }
  return kExitSuccess;
}

int cmd_geweke(const std::string& sampler, const std::string& toy_path, std::int64_t outer,
               const std::string& mutation, const fs::path& out) {
  const SamplerKind kind = parse_sampler_kind(sampler);
  const Mutation mut = parse_mutation(mutation);
  if (outer < kMinGewekeOuter) {
    throw InvalidInput("--outer must be at least " + std::to_string(kMinGewekeOuter) +
                       " outer draws (got " + std::to_string(outer) + ")");
  }
  json toy_doc = toy_path.empty() ? json::object() : read_json(toy_path);
  const GewekeToySpec spec = geweke_toy_from_json(toy_doc);
  const GewekeResult r = geweke_joint_test(kind, spec, outer, mut);
  write_text(out, geweke_to_csv(r));
  fs::path side = out;
  side.replace_extension(".json");
  write_json(side, {{"sampler", sampler},
                    {"mutation", mutation},
                    {"outer", outer},
                    {"toy_spec", toy_doc},
                    {"seed", spec.seed},
                    {"max_abs_z", r.max_abs_z()},
                    {"failure", r.failure},
                    {"passed", r.passed()}});
  if (!r.failure.empty()) std::cout << r.failure << '\n';
  std::cout << "max |z| = " << r.max_abs_z() << (r.passed() ? " (pass)" : " (fail)") << '\n';
  return r.passed() ? kExitSuccess : kExitFailure;
}

int cmd_selftest(const fs::path& out, std::uint64_t seed) {
  SelftestOptions o;
  o.seed = seed;
  const SelftestResult r = run_pg_selftest(o);
  json doc = to_json(r);
  doc["seed"] = seed;
  write_json(out, doc);
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.group << ": " << c.name << " ("
              << c.statistic << " vs " << c.threshold << ")\n";
  }
  return r.passed() ? kExitSuccess : kExitFailure;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Bayesian mixed logit samplers: Metropolis-within-Gibbs and Polya-Gamma"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  std::string preset_name;
  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool with_beta = false;
  auto* preset_opt = gen->add_option("--preset", preset_name, "mnl-j3 | mmnl-j2 | mmnl-j3");
  auto* spec_opt = gen->add_option("--spec", spec_path, "scenario JSON")->check(CLI::ExistingFile);
  preset_opt->excludes(spec_opt);
  gen->add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = gen->add_option("--seed", seed, "override the scenario seed");
  gen->add_flag("--with-beta", with_beta, "store drawn individual tastes in truth.json");

  auto* fit = app.add_subcommand("fit", "run a sampler");
  std::string config_path;
  int chains = 1;
  fit->add_option("--config", config_path, "run configuration JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--chains", chains, "independent chains");

  auto* compare = app.add_subcommand("compare", "compare two chains");
  std::string chain_a;
  std::string chain_b;
  std::string map_path;
  std::string compare_out = "compare.csv";
  compare->add_option("--a", chain_a)->required()->check(CLI::ExistingFile);
  compare->add_option("--b", chain_b)->required()->check(CLI::ExistingFile);
  compare->add_option("--map", map_path, "JSON name pairs")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", compare_out);

  auto* geweke = app.add_subcommand("geweke", "joint-distribution test of a sampler");
  std::string sampler = "mh";
  std::string toy_path;
  std::int64_t outer = 0;
  std::string mutation = "none";
  std::string geweke_out = "geweke.csv";
  geweke->add_option("--sampler", sampler, "mh | pg | prior")->required();
  geweke->add_option("--toy-spec", toy_path, "toy design JSON")->check(CLI::ExistingFile);
  geweke->add_option("--outer", outer, "outer draws")->required();
  geweke->add_option("--mutation", mutation, "none | a | omega | zeta | beta | alpha");
  geweke->add_option("--out", geweke_out);

  auto* selftest = app.add_subcommand("pg-selftest", "Polya-Gamma generator checks");
  std::string selftest_out = "selftest.json";
  std::uint64_t selftest_seed = SelftestOptions{}.seed;
  selftest->add_option("--out", selftest_out);
  selftest->add_option("--seed", selftest_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitFailure;
  }

  try {
    if (gen->parsed()) {
      if (preset_name.empty() == spec_path.empty()) {
        throw InvalidInput("gen: exactly one of --preset and --spec is required");
      }
      return cmd_gen(preset_name, spec_path, out_dir,
                     seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     with_beta);
    }
    if (fit->parsed()) return cmd_fit(config_path, chains);
    if (compare->parsed()) return cmd_compare(chain_a, chain_b, map_path, compare_out);
    if (geweke->parsed()) return cmd_geweke(sampler, toy_path, outer, mutation, geweke_out);
    if (selftest->parsed()) return cmd_selftest(selftest_out, selftest_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace mixlogit
