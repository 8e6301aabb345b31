#include "doctest.h"
#include "mixlogit/cli.hpp"
#include "mixlogit/errors.hpp"
#include "mixlogit/io.hpp"

#include <filesystem>
#include <string>
#include <vector>

using namespace mixlogit;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "mixlogit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("gen is byte-identical across runs") {
  TempDir d("mixlogit_cli_gen");
  REQUIRE(run({"gen", "--preset", "mmnl-j2", "--out", d / "a"}) == kExitSuccess);
  REQUIRE(run({"gen", "--preset", "mmnl-j2", "--out", d / "b"}) == kExitSuccess);
  for (const char* f : {"dataset.csv", "truth.json", "meta.json"}) {
    CAPTURE(f);
    CHECK(read_text(d / (std::string("a/") + f)) == read_text(d / (std::string("b/") + f)));
  }
  REQUIRE(run({"gen", "--preset", "mmnl-j2", "--seed", "99", "--out", d / "c"}) == kExitSuccess);
  CHECK(read_text(d / "a/dataset.csv") != read_text(d / "c/dataset.csv"));
  CHECK(dataset_from_csv(read_text(d / "a/dataset.csv")) == generate(preset("mmnl-j2")).dataset);
}

TEST_CASE("gen rejects an unknown preset") {
  TempDir d("mixlogit_cli_badgen");
  CHECK(run({"gen", "--preset", "nope", "--out", d / "x"}) == kExitFailure);
  CHECK(!fs::exists(d / "x/dataset.csv"));
}

TEST_CASE("fit on a generated dataset writes chain and report") {
  TempDir d("mixlogit_cli_fit");
  REQUIRE(run({"gen", "--preset", "mmnl-j2", "--out", d / "data"}) == kExitSuccess);
  write_json(d / "cfg.json", json{{"dataset-path", "data/dataset.csv"},
                                  {"truth-path", "data/truth.json"},
                                  {"sampler", {{"kind", "pg"}, {"n_iter", 150}, {"n_burn", 20}}},
                                  {"output-dir", "out"}});
  REQUIRE(run({"fit", "--config", d / "cfg.json"}) == kExitSuccess);
  const Chain c = read_chain_csv(d / "out/chain.csv");
  CHECK(c.n_draws() == 130);
  const json report = read_json(d / "out/report.json");
  CHECK(report.contains("summary"));
  CHECK(report.contains("recovery"));
  CHECK(!fs::exists(d / "out/divergence.json"));

  write_json(d / "cfg2.json", json{{"dataset-path", "data/dataset.csv"},
                                   {"sampler", {{"kind", "pg"}, {"n_iter", 150}, {"n_burn", 20}}},
                                   {"output-dir", "out2"}});
  REQUIRE(run({"fit", "--config", d / "cfg2.json"}) == kExitSuccess);
  CHECK(read_text(d / "out/chain.csv") == read_text(d / "out2/chain.csv"));
}

TEST_CASE("malformed configs fail before writing anything") {
  TempDir d("mixlogit_cli_badcfg");
  const std::vector<json> bad{
      json{{"scenario", "mmnl-j2"}, {"sampler", {{"kind", "mh"}}}, {"output-dir", "o"}, {"extra", 1}},
      json{{"scenario", "mmnl-j2"}, {"dataset-path", "x.csv"}, {"sampler", {{"kind", "mh"}}},
           {"output-dir", "o"}},
      json{{"scenario", "mmnl-j2"}, {"sampler", {{"kind", "gibbs"}}}, {"output-dir", "o"}},
      json{{"scenario", "mmnl-j2"}, {"sampler", {{"kind", "mh"}, {"n_burn", -1}}},
           {"output-dir", "o"}},
      json{{"scenario", "mmnl-j2"}, {"sampler", {{"kind", "pg"}}}},
      json{{"dataset-path", "missing.csv"}, {"sampler", {{"kind", "pg"}}}, {"output-dir", "o"}},
  };
  for (std::size_t i = 0; i < bad.size(); ++i) {
    CAPTURE(i);
    write_json(d / "cfg.json", bad[i]);
    CHECK(run({"fit", "--config", d / "cfg.json"}) == kExitFailure);
    CHECK(!fs::exists(d / "o"));
  }
  write_text(d / "broken.json", "{not json");
  CHECK(run({"fit", "--config", d / "broken.json"}) == kExitFailure);
}

TEST_CASE("compare of a chain with itself gives zeros") {
  TempDir d("mixlogit_cli_compare");
  write_json(d / "cfg.json", json{{"scenario", "mnl-j3"},
                                  {"sampler", {{"kind", "pg"}, {"n_iter", 220}, {"n_burn", 20}}},
                                  {"output-dir", "out"}});
  REQUIRE(run({"fit", "--config", d / "cfg.json"}) == kExitSuccess);
  write_json(d / "map.json", json{{"alpha[1][1]", "alpha[1][1]"}, {"alpha[2][2]", "alpha[2][2]"}});
  REQUIRE(run({"compare", "--a", d / "out/chain.csv", "--b", d / "out/chain.csv", "--map",
               d / "map.json", "--out", d / "cmp.csv"}) == kExitSuccess);
  const std::string csv = read_text(d / "cmp.csv");
  CHECK(csv.find("alpha[1][1],alpha[1][1]") != std::string::npos);
  CHECK(csv.find(",0,") != std::string::npos);
}

TEST_CASE("geweke enforces the minimum outer count") {
  TempDir d("mixlogit_cli_geweke");
  CHECK(run({"geweke", "--sampler", "mh", "--outer", "10", "--out", d / "g.csv"}) == kExitFailure);
  CHECK(!fs::exists(d / "g.csv"));
  CHECK(run({"geweke", "--sampler", "bogus", "--outer", "1000", "--out", d / "g.csv"}) ==
        kExitFailure);
}

TEST_CASE("unknown subcommands and missing options fail") {
  CHECK(run({"frobnicate"}) != kExitSuccess);
  CHECK(run({"fit"}) != kExitSuccess);
}

TEST_CASE("cross-sampler maps") {
  const auto mnl = cross_sampler_map(preset("mnl-j3"));
  CHECK(mnl.front() == std::pair<std::string, std::string>{"alpha[1]", "alpha[1][1]"});
  CHECK(mnl.size() == 6);
  const auto mmnl = cross_sampler_map(preset("mmnl-j2"));
  CHECK(std::find(mmnl.begin(), mmnl.end(),
                  std::pair<std::string, std::string>{"omega[2][2]", "omega[2][2]"}) != mmnl.end());
  CHECK(std::find(mmnl.begin(), mmnl.end(),
                  std::pair<std::string, std::string>{"zeta[1]", "zeta[1][1]"}) != mmnl.end());
}
