#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nlslab/config.hpp"
#include "nlslab/error.hpp"
#include "nlslab/experiments.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

std::string scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlslab_test_" + name);
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class F>
void expect_parse_error(F&& f, std::size_t line, std::size_t column) {
  try {
    f();
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.line() == line);
    CHECK(e.column() == column);
  }
}

template <class F>
void expect_validation_error(F&& f, const std::string& field) {
  try {
    f();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.field() == field);
  }
}

}  // namespace

TEST_CASE("a minimal config gets the defaults") {
  const auto cfg = parse_config("experiment = spectrum\n");
  RunConfig ref;
  ref.experiment = "spectrum";
  CHECK(cfg == ref);
  CHECK(parse_config("") == RunConfig{});
}

TEST_CASE("sections, comments and quoting") {
  const auto cfg = parse_config(
      "# header comment\n"
      "experiment = evolve   ; trailing\n"
      "dimension = 2\n"
      "output_dir = \"out # not a comment\"\n"
      "[grid]\n"
      "n = 64\n"
      "box = 20.5\n"
      "[evolve]\n"
      "dt = 5e-4\n"
      "initial = gaussian\n"
      "[extra]\n"
      "trials = 7\n");
  CHECK(cfg.experiment == "evolve");
  CHECK(cfg.dimension == 2);
  CHECK(cfg.output_dir == "out # not a comment");
  CHECK(cfg.n == 64);
  CHECK(cfg.box == 20.5);
  CHECK(cfg.dt == 5e-4);
  CHECK(cfg.initial == "gaussian");
  CHECK(cfg.trials == 7);
}

TEST_CASE("serialize and parse round trip") {
  RunConfig cfg;
  cfg.experiment = "decompose";
  cfg.dimension = 2;
  cfg.seed = 18446744073709551615ull;
  cfg.output_dir = "some dir/with spaces";
  cfg.n = 128;
  cfg.box = 0.1 + 0.2;
  cfg.tol_orth = 3.3e-10;
  cfg.dt = 1.0 / 3.0;
  cfg.alpha = 0.45;
  CHECK(parse_config(serialize_config(cfg)) == cfg);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("malformed input is located") {
  expect_parse_error([] { parse_config("experiment = spectrum\n  bogus = 3\n"); }, 2, 3);
  expect_parse_error([] { parse_config("dt = 1e-3\n[evolve]\ndt = 2e-3\n"); }, 3, 1);
  expect_parse_error([] { parse_config("[nowhere]\n"); }, 1, 2);
  expect_parse_error([] { parse_config("seed = -4\n"); }, 1, 8);
  expect_parse_error([] { parse_config("n = 4294967312\n"); }, 1, 5);
  expect_parse_error([] { parse_config("seed 5\n"); }, 1, 1);
  expect_parse_error([] { parse_config("[grid]\ndt = 1e-3\n"); }, 2, 1);
  expect_parse_error([] { parse_config("dimension = two\n"); }, 1, 13);
}

TEST_CASE("invalid values name the field") {
  expect_validation_error([] { parse_config("dt = -1\n"); }, "dt");
  expect_validation_error([] { parse_config("experiment = nothing\n"); }, "experiment");
  expect_validation_error([] { parse_config("experiment = evolve\ndimension = 3\n"); }, "dimension");
  expect_validation_error([] { parse_config("experiment = evolve\n[grid]\nn = 100\n"); }, "n");
  expect_validation_error([] { parse_config("[extra]\nt_stop = 1.5\n"); }, "t_stop");
  RunConfig cfg;
  expect_validation_error([&] { set_config_value(cfg, "no_such_key", "1"); }, "no_such_key");
  expect_validation_error([&] { set_config_value(cfg, "record_every", "x"); }, "record_every");
}

TEST_CASE("overrides replace single keys") {
  auto cfg = parse_config("experiment = evolve\ndt = 1e-3\n");
  set_config_value(cfg, "dt", "2.5e-4");
  set_config_value(cfg, "initial", "gaussian");
  CHECK(cfg.dt == 2.5e-4);
  CHECK(cfg.initial == "gaussian");
  CHECK(cfg.experiment == "evolve");
  for (const auto& key : config_keys()) CHECK_FALSE(key.empty());
}

TEST_CASE("resolve fills preset defaults") {
  RunConfig cfg;
  cfg.experiment = "decompose";
  auto r = resolve(cfg);
  CHECK(r.n == 512);
  CHECK(r.box == 40.0);
  CHECK(r.trials == 100);
  cfg.experiment = "pc-blowup";
  CHECK(resolve(cfg).alpha == 0.7);
  cfg.n = 256;
  CHECK(resolve(cfg).n == 256);
}

TEST_CASE("experiment output is byte-reproducible") {
  RunConfig cfg;
  cfg.experiment = "gn-sweep";
  cfg.trials = 30;
  cfg.output_dir = scratch_dir("gn_a");
  const auto a = run_experiment(cfg);
  const auto first = slurp(cfg.output_dir + "/summary.json");
  const auto csv_first = slurp(cfg.output_dir + "/gn_trials.csv");
  const auto b = run_experiment(cfg);
  CHECK(a.status == 0);
  CHECK(a.summary_json == b.summary_json);
  CHECK(slurp(cfg.output_dir + "/summary.json") == first);
  CHECK(slurp(cfg.output_dir + "/gn_trials.csv") == csv_first);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("identity-suite summary") {
  RunConfig cfg;
  cfg.experiment = "identity-suite";
  cfg.output_dir = scratch_dir("ids");
  const auto res = run_experiment(cfg);
  CHECK(res.status == 0);
  const auto j = nlohmann::json::parse(slurp(cfg.output_dir + "/summary.json"));
  CHECK(j["experiment"] == "identity-suite");
  CHECK(j["status"] == "pass");
  CHECK(j["results"]["lambda_d"].get<double>() == doctest::Approx(8.0).epsilon(1e-5 / 8));
  CHECK(j["results"]["pohozaev"].get<double>() < 1e-8);
  CHECK(j["config"]["dimension"] == 1);
  for (const auto& f : res.files) CHECK(fs::exists(fs::path(cfg.output_dir) / f));
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("pc-blowup recovers linear lambda") {
  RunConfig cfg;
  cfg.experiment = "pc-blowup";
  cfg.output_dir = scratch_dir("pc");
  const auto res = run_experiment(cfg);
  const auto j = nlohmann::json::parse(res.summary_json);
  const double slope = j["results"]["lambda_fit_slope"].get<double>();
  CHECK(slope > 0.98);
  CHECK(slope < 1.02);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("validation happens before any output") {
  RunConfig cfg;
  cfg.experiment = "evolve";
  cfg.dt = 0.0;
  cfg.output_dir = scratch_dir("never");
  expect_validation_error([&] { run_experiment(cfg); }, "dt");
  CHECK_FALSE(fs::exists(cfg.output_dir));
}
