#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pairtunnel/config.hpp"
#include "pairtunnel/io_util.hpp"

using namespace pairtunnel;
using nlohmann::json;

TEST_CASE("run config round-trips losslessly") {
  RunConfig c;
  c.model = Model::ThreeState;
  c.J = 1.5;
  c.U0 = -4.25;
  c.U1 = -2.125;
  c.num_sites = 321;
  c.boundary = Boundary::Periodic;
  c.potential_shape = "gaussian";
  c.V = -2.2;
  c.sigma = 0.65;
  c.kappa_grid = {0.1, 0.2, 0.3};
  c.V_grid = {-1, 0, 1};
  c.one_state_hopping = 0.366;
  c.threads = 3;

  const RunConfig back = RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.canonical_dump() == c.canonical_dump());
  CHECK(fnv1a_hex(back.canonical_dump()) == fnv1a_hex(c.canonical_dump()));
}

TEST_CASE("unknown keys are rejected") {
  json j = RunConfig().to_json();
  j["no_such_knob"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("type and value errors are config errors") {
  json j = RunConfig().to_json();
  j["J"] = "strong";
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

  json bad_format = RunConfig().to_json();
  bad_format["format"] = "xml";
  CHECK_THROWS_AS(RunConfig::from_json(bad_format), ConfigError);

  json bad_threads = RunConfig().to_json();
  bad_threads["threads"] = 0;
  CHECK_THROWS_AS(RunConfig::from_json(bad_threads), ConfigError);
}

TEST_CASE("presets carry the reference parameters") {
  const RunConfig left = preset("fig1-left");
  CHECK(left.U0 == -2.0);
  CHECK(left.U1 == 0.0);
  CHECK(left.num_sites == 11);
  CHECK(left.boundary == Boundary::Periodic);
  CHECK_FALSE(left.theta_grid.empty());

  const RunConfig right = preset("fig1-right");
  CHECK(right.U0 == -5.0);
  CHECK(right.U1 == -3.0);

  const RunConfig f2 = preset("fig2");
  CHECK(f2.sigma == 0.65);
  CHECK(f2.kappa_grid.size() == 1);
  CHECK(f2.kappa_grid[0] == doctest::Approx(1.5707963267948966));

  const RunConfig f9 = preset("fig9");
  CHECK(f9.sigma == 0.65);
  CHECK(f9.model_params().gap() == doctest::Approx(2.0));

  const RunConfig f3 = preset("fig3");
  CHECK(f3.U0 == -2.0);
  CHECK(f3.V == -2.0);
  CHECK(f3.num_sites == 201);

  const RunConfig f7 = preset("fig7");
  CHECK(f7.U0 == -4.0);
  CHECK(f7.U1 == -2.0);
  CHECK(f7.V == -2.2);

  CHECK(preset("fig4-top").U0 == -8.0);
  CHECK(preset("fig4-mid").U1 == -2.0);
  CHECK(preset("fig4-bot").U1 == 0.0);
  CHECK_THROWS_AS(preset("fig42"), ConfigError);
}

TEST_CASE("result records are self-describing") {
  RunConfig c = preset("fig3");
  const json rec = result_record(c, "dynamics", json{{"P_t", 0.5}}, {"flagged"});
  CHECK(rec.at("config").at("U0") == -2.0);
  CHECK(rec.at("config_hash") == fnv1a_hex(c.canonical_dump()));
  CHECK(rec.at("method") == "dynamics");
  CHECK(rec.at("outputs").at("P_t") == 0.5);
  // the embedded config re-parses into the same run
  const RunConfig back = RunConfig::from_json(rec.at("config"));
  CHECK(back.canonical_dump() == c.canonical_dump());
}

TEST_CASE("float formatting is stable at 12 significant digits") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(-2.8284271247461903) == "-2.82842712475");
  CHECK(format_double(1e-14) == "1e-14");
  CHECK(format_double(0.0) == "0");
}

TEST_CASE("csv writer emits deterministic bytes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pairtunnel_test_csv";
  fs::create_directories(dir);
  auto write_one = [&](const fs::path& p) {
    CsvWriter csv(p.string());
    csv.comment("config_hash deadbeef");
    csv.header({"a", "b"});
    csv.row({format_double(1.0 / 3.0), format_double(-2.82842712474619)});
  };
  write_one(dir / "a.csv");
  write_one(dir / "b.csv");
  std::ifstream a(dir / "a.csv"), b(dir / "b.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("# config_hash deadbeef") == 0);
  fs::remove_all(dir);
}
