#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "stackgame/config.hpp"
#include "stackgame/csv.hpp"
#include "stackgame/errors.hpp"
#include "stackgame/pipeline.hpp"

using namespace stackgame;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("stackgame-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_field(const std::string& text) {
  try {
    config_from_json(parse_config_text(text));
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

/// A fisher run small enough for a unit test.
RunConfig tiny_fisher(const std::string& out) {
  RunConfig c = preset_config("paper-small-linear");
  c.gda.outer_iters = 20;
  c.gda.inner_iters = 20;
  c.fitted_vi.n_budget_samples = 6;
  c.fitted_vi.n_value_iters = 2;
  c.evaluate.horizon = 3;
  c.evaluate.n_paths = 2;
  c.evaluate.best_response.n_starts = 2;
  c.evaluate.best_response.max_iters = 50;
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5e-10) == "-2.5e-10");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("csv writer checks row width") {
  std::ostringstream os;
  CsvWriter w(os, {"a", "b"});
  w.field(1).field(0.5);
  w.end_row();
  CHECK(os.str() == std::string(kCsvSchemaLine) + "\na,b\n1,0.5\n");
  w.field(1);
  CHECK_THROWS_AS(w.end_row(), std::logic_error);
}

TEST_CASE("every preset survives a dump and reload") {
  const auto names = preset_names();
  CHECK(names.size() == 6);
  for (const auto& name : names) {
    CAPTURE(name);
    const RunConfig c = preset_config(name);
    const auto dumped = config_to_json(c);
    const auto reloaded = config_to_json(config_from_json(parse_config_text(dumped.dump(2))));
    CHECK(reloaded == dumped);
  }
  CHECK_THROWS_AS(preset_config("paper-medium-linear"), ConfigError);
}

TEST_CASE("presets build markets of the advertised shape") {
  const RunConfig big = preset_config("paper-big-leontief");
  const FisherMarket m = build_market(big.market, big.seed);
  CHECK(m.n_buyers() == 5);
  CHECK(m.n_goods() == 5);
  CHECK(m.dynamics.rates.size() == 5);
  CHECK(big.gda.savings_gradient == SavingsGradient::BudgetDerivative);
  const RunConfig small = preset_config("paper-small-cobb-douglas");
  const FisherMarket s = build_market(small.market, 3);
  CHECK(s.n_buyers() == 2);
  CHECK(s.dynamics.rates.size() == 1);
  // Same seed, same valuations.
  CHECK(build_market(small.market, 3).utilities[1].theta == s.utilities[1].theta);
}

TEST_CASE("json overlay on a preset") {
  const RunConfig c = config_from_json(parse_config_text(
      R"({"preset": "paper-big-linear", "seed": 7, "market": {"n_buyers": 2, "n_goods": 2}})"));
  CHECK(c.seed == 7);
  CHECK(c.market.n_buyers == 2);
  CHECK(c.market.utility_scale == 30.0);
  CHECK(c.preset == "paper-big-linear");
  const RunConfig g = config_from_json(
      parse_config_text(R"({"gda": {"savings_gradient": "expected-rate"}})"), "paper-big-linear");
  CHECK(g.gda.savings_gradient == SavingsGradient::ExpectedRate);
}

TEST_CASE("config errors name the offending field") {
  CHECK(error_field(R"({"market": {"n_buyerz": 2}})") == "market.n_buyerz");
  CHECK(error_field(R"({"gda": {"eta_x": "fast"}})") == "gda.eta_x");
  CHECK(error_field(R"({"preset": "nope"})") == "preset");
  CHECK(error_field(R"({"gda": {"savings_gradient": "sideways"}})") == "gda.savings_gradient");
  CHECK(error_field(R"({"market": {"n_buyers": 2}})") == "<none>");
  try {
    parse_config_text("{\n  \"seed\": 1,\n  oops\n}");
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "config");
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("bound mode prints the iteration count") {
  RunConfig c;
  c.mode = "bound";
  CHECK(run_pipeline(c) == "70");
  c.mode = "dance";
  CHECK_THROWS_AS(run_pipeline(c), ConfigError);
}

TEST_CASE("grid pipeline output is byte-identical across runs") {
  RunConfig c;
  c.mode = "solve-grid";
  c.game.name = "three-state";
  c.out = scratch_dir("grid-a").string();
  run_pipeline(c);
  const std::string first = read_file(fs::path(c.out) / "values.csv");
  c.out = scratch_dir("grid-b").string();
  c.threads = 4;
  run_pipeline(c);
  CHECK(read_file(fs::path(c.out) / "values.csv") == first);
  CHECK(first.rfind(std::string(kCsvSchemaLine) + "\niter,v_1,v_2,v_3,sup_norm_delta\n", 0) == 0);
}

TEST_CASE("fisher pipelines are byte-identical across runs and thread counts") {
  std::string files[2][4];
  for (int run = 0; run < 2; ++run) {
    RunConfig c = tiny_fisher(scratch_dir("fisher-" + std::to_string(run)).string());
    c.threads = run == 0 ? 1 : 3;
    c.mode = "solve-fisher";
    run_pipeline(c);
    c.mode = "evaluate";
    run_pipeline(c);
    c.mode = "verify";
    run_pipeline(c);
    const fs::path out(c.out);
    files[run][0] = read_file(out / "trajectory.csv");
    files[run][1] = read_file(out / "rollout.csv");
    files[run][2] = read_file(out / "report.csv");
    files[run][3] = read_file(out / "verify.csv");
  }
  for (int k = 0; k < 4; ++k) CHECK(files[0][k] == files[1][k]);
  CHECK(files[0][2].find("buyer,u_hat,u_star,distance_to_um,distance_to_mc") != std::string::npos);
}

TEST_CASE("evaluate rejects a value function from a different market") {
  RunConfig c = tiny_fisher(scratch_dir("mismatch").string());
  c.mode = "solve-fisher";
  run_pipeline(c);
  c.mode = "evaluate";
  c.seed = 2;
  CHECK_THROWS_AS(run_pipeline(c), ConfigError);
}
