#include "doctest.h"
#include "mixlogit/errors.hpp"
#include "mixlogit/io.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

using namespace mixlogit;

namespace {

Chain small_chain() {
  Chain c;
  c.names = {"alpha[1]", "zeta[1]"};
  c.add_draw(10, std::vector<double>{0.1, -1.0 / 3.0});
  c.add_draw(11, std::vector<double>{1e-300, 6.02214076e23});
  c.add_draw(12, std::vector<double>{-0.0, 123456789.123456789});
  return c;
}

}  // namespace

TEST_CASE("shortest round-trip number formatting") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-310, 1e308, 6.02214076e23, 0.0, 42.0}) {
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(42.0) == "42");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  CHECK_THROWS_AS(parse_double("1.5x"), InvalidInput);
  CHECK_THROWS_AS(parse_double(""), InvalidInput);
}

TEST_CASE("dataset CSV round trip is lossless, header is exact") {
  const auto g = generate(preset("mmnl-j3"));
  const std::string csv = dataset_to_csv(g.dataset);
  CHECK(csv.rfind("n,t,alt,chosen,xf_1,xr_1,xr_2\n", 0) == 0);
  const ChoiceDataset back = dataset_from_csv(csv);
  CHECK(back == g.dataset);
  CHECK(dataset_to_csv(back) == csv);
}

TEST_CASE("dataset CSV without fixed covariates") {
  ChoiceDataset d = ChoiceDataset::zeros(2, 1, 2, 0, 1);
  d.random_at(1, 0, 1, 0) = 0.5;
  d.y = {1, 0};
  const std::string csv = dataset_to_csv(d);
  CHECK(csv.rfind("n,t,alt,chosen,xr_1\n", 0) == 0);
  CHECK(dataset_from_csv(csv) == d);
}

TEST_CASE("malformed dataset rows name their location") {
  const std::string header = "n,t,alt,chosen,xf_1\n";
  auto message = [](const std::string& text) {
    try {
      dataset_from_csv(text, "d.csv");
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(header + "1,1,1,1,0.5\n1,1,2,0,abc\n").find("d.csv:3") != std::string::npos);
  CHECK(message(header + "1,1,1,1,0.5\n1,1,2,0\n").find("d.csv:3") != std::string::npos);
  CHECK(message(header + "1,1,1,1,0.5\n1,1,2,1,0.1\n").find("d.csv") != std::string::npos);
  CHECK(message("n,t,alt,chosen,foo\n1,1,1,1,0\n").find("d.csv:1") != std::string::npos);
  CHECK(message("").find("d.csv") != std::string::npos);
}

TEST_CASE("chain CSV round trip is lossless") {
  const Chain c = small_chain();
  const std::string csv = chain_to_csv(c);
  CHECK(csv.rfind("iter,alpha[1],zeta[1]\n", 0) == 0);
  const Chain back = chain_from_csv(csv);
  CHECK(back.names == c.names);
  CHECK(back.iterations == c.iterations);
  REQUIRE(back.draws.size() == c.draws.size());
  for (std::size_t i = 0; i < c.draws.size(); ++i) {
    CHECK(back.draws[i] == c.draws[i]);
    CHECK(std::signbit(back.draws[i]) == std::signbit(c.draws[i]));
  }
}

TEST_CASE("files are written atomically and read back") {
  const auto dir = std::filesystem::temp_directory_path() / "mixlogit_io_test";
  std::filesystem::create_directories(dir);
  write_chain_csv(dir / "chain.csv", small_chain());
  CHECK(read_chain_csv(dir / "chain.csv").draws == small_chain().draws);
  write_json(dir / "x.json", json{{"v", 0.1}});
  CHECK(read_json(dir / "x.json").at("v").get<double>() == 0.1);
  CHECK(!std::filesystem::exists(dir / "x.json.tmp"));
  CHECK_THROWS(read_text(dir / "missing.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario and hyperparameter JSON round trip") {
  for (const char* name : {"mnl-j3", "mmnl-j2", "mmnl-j3"}) {
    CAPTURE(name);
    const ScenarioSpec s = preset(name);
    const ScenarioSpec back = scenario_from_json(to_json(s));
    CHECK(to_json(back) == to_json(s));
    CHECK(back.alpha == s.alpha);
    CHECK(back.omega == s.omega);
  }
  HyperParameters h = HyperParameters::defaults(2, 2);
  h.nu = 3.5;
  h.A(1) = 0.1;
  const HyperParameters hb = hyper_from_json(to_json(h), 2, 2);
  CHECK(hb.nu == 3.5);
  CHECK(hb.A == h.A);
  CHECK(hb.xi0 == h.xi0);
  const HyperParameters scalar_a = hyper_from_json(json{{"A", 2.0}}, 1, 3);
  CHECK(scalar_a.A == Eigen::VectorXd::Constant(3, 2.0));
}

TEST_CASE("sampler configs round trip and reject unknown keys") {
  MhConfig mh;
  mh.rho_beta = 0.37;
  mh.n_iter = 123;
  mh.n_burn = 23;
  mh.expand_alternative_specific = true;
  const MhConfig mb = mh_config_from_json(to_json(mh));
  CHECK(mb.rho_beta == 0.37);
  CHECK(mb.n_iter == 123);
  CHECK(mb.expand_alternative_specific);
  CHECK(to_json(mb) == to_json(mh));
  PgConfig pg;
  pg.phi_schedule = PhiSchedule::kPrinted;
  pg.divergence.v_max = 50.0;
  const PgConfig pb = pg_config_from_json(to_json(pg));
  CHECK(pb.phi_schedule == PhiSchedule::kPrinted);
  CHECK(pb.divergence.v_max == 50.0);
  CHECK(to_json(pb) == to_json(pg));
  CHECK_THROWS_AS(mh_config_from_json(json{{"n_iterations", 5}}), InvalidInput);
  CHECK_THROWS_AS(pg_config_from_json(json{{"n_iter", "many"}}), InvalidInput);
  CHECK_THROWS_AS(scenario_from_json(json{{"N", 5}, {"bogus", 1}}), InvalidInput);
}

TEST_CASE("matrix JSON") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 0.1;
  CHECK(matrix_from_json(to_json(m), "m") == m);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1,2],[3]]"), "m"), InvalidInput);
  CHECK_THROWS_AS(vector_from_json(json::parse("[1,\"a\"]"), "v"), InvalidInput);
}

TEST_CASE("parameter maps accept objects and pair arrays") {
  const auto a = param_map_from_json(json::parse(R"({"alpha[1]":"alpha[1][1]"})"));
  const auto b = param_map_from_json(json::parse(R"([["alpha[1]","alpha[1][1]"]])"));
  CHECK(a == b);
  CHECK_THROWS_AS(param_map_from_json(json::parse("[[1,2]]")), InvalidInput);
}

TEST_CASE("comparison CSV header") {
  Comparison c;
  c.rows.push_back({"x", "y", 1.0, 2.0, 0.5, 0.5, -1.0});
  const std::string csv = comparison_to_csv(c);
  CHECK(csv.rfind("name_a,name_b,mean_a,mean_b,se_a,se_b,z,unmapped\n", 0) == 0);
}

TEST_CASE("divergence report JSON writes non-finite values as null") {
  DivergenceReport r;
  r.triggered = true;
  r.iteration = 7;
  r.reason = DivergenceReason::kNonFinite;
  MonitorPoint p;
  p.iteration = 7;
  p.max_abs_v = std::numeric_limits<double>::infinity();
  r.trace.push_back(p);
  const json j = to_json(r);
  CHECK(j.dump().find("null") != std::string::npos);
  CHECK(j.at("iteration") == 7);
}
