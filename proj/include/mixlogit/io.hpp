#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mixlogit/diagnostics.hpp"
#include "mixlogit/geweke.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/sampler_mh.hpp"
#include "mixlogit/sampler_pg.hpp"
#include "mixlogit/synthgen.hpp"

namespace mixlogit {

using nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
/// Whole-field parse; throws InvalidInput on trailing garbage.
double parse_double(std::string_view text);

// Dataset CSV: header n,t,alt,chosen,xf_1..xf_L,xr_1..xr_K; 1-based indices;
// one row per (n, t, alt) in that order.
std::string dataset_to_csv(const ChoiceDataset& data);
ChoiceDataset dataset_from_csv(std::string_view text, const std::string& source = "<memory>");
void write_dataset_csv(const std::filesystem::path& path, const ChoiceDataset& data);
ChoiceDataset read_dataset_csv(const std::filesystem::path& path);

// Chain CSV: header iter,<names>; one row per stored draw.
std::string chain_to_csv(const Chain& chain);
Chain chain_from_csv(std::string_view text, const std::string& source = "<memory>");
void write_chain_csv(const std::filesystem::path& path, const Chain& chain);
Chain read_chain_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames into place.
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

/// Throws InvalidInput naming the first key of `obj` outside `allowed`.
void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where);

json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where);
Eigen::VectorXd vector_from_json(const json& j, const std::string& where);

json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const json& j);

json to_json(const HyperParameters& hyper);
/// Missing keys take the defaults for (L, K).
HyperParameters hyper_from_json(const json& j, int L, int K);

json to_json(const TrueParams& truth, bool with_beta);

json to_json(const DivergenceThresholds& t);
DivergenceThresholds divergence_thresholds_from_json(const json& j);

json to_json(const MhConfig& c);
MhConfig mh_config_from_json(const json& j);
json to_json(const PgConfig& c);
PgConfig pg_config_from_json(const json& j);

json to_json(const Summary& s);
json to_json(const RecoveryReport& r);
json to_json(const DivergenceReport& r);

std::string comparison_to_csv(const Comparison& c);
/// Accepts {"a": "b", ...} or [["a", "b"], ...].
std::vector<std::pair<std::string, std::string>> param_map_from_json(const json& j);

std::string geweke_to_csv(const GewekeResult& r);
GewekeToySpec geweke_toy_from_json(const json& j);

}  // namespace mixlogit
