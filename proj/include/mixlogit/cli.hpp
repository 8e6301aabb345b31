#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/sampler_mh.hpp"
#include "mixlogit/sampler_pg.hpp"
#include "mixlogit/synthgen.hpp"

namespace mixlogit {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDivergence = 2;

enum class FitSampler { kMh, kPg };

/// Parsed and validated run configuration. Everything is checked before any
/// output is written.
struct FitConfig {
  std::optional<ScenarioSpec> scenario;
  std::filesystem::path dataset_path;
  std::filesystem::path truth_path;
  nlohmann::json hyper = nlohmann::json::object();
  FitSampler sampler = FitSampler::kMh;
  MhConfig mh;
  PgConfig pg;
  std::filesystem::path output_dir;
  nlohmann::json echo;
};

/// Relative paths inside the document resolve against `base_dir`.
FitConfig parse_fit_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Names in the fitted chain paired with true values. MH chains on an
/// expanded design use alpha[(j-1)L + l]; PG chains use alpha[j][l]. A
/// generic truth maps onto alternative 1 of the PG parameterisation.
std::vector<std::pair<std::string, double>> truth_pairs(ModelKind truth_kind,
                                                        const Eigen::MatrixXd& alpha,
                                                        const Eigen::MatrixXd& zeta,
                                                        const Eigen::MatrixXd& omega,
                                                        FitSampler sampler, bool expanded);

/// MH-chain name to PG-chain name pairs for a scenario: expanded alpha for
/// MNL; alpha, zeta and diag(Omega) of alternative 1 for the generic model.
std::vector<std::pair<std::string, std::string>> cross_sampler_map(const ScenarioSpec& spec);

/// Entry point of the `mixlogit` executable; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace mixlogit
