// stackgame: batch front end for the grid and Fisher-market pipelines.
//
//   stackgame --preset paper-small-linear --mode solve-fisher --out run1
//   stackgame --preset paper-small-linear --mode evaluate --out run1
//   stackgame --config run.json --seed 7 --threads 4
//
// Failures print one line "error kind=<kind> field=<field> message=<text>"
// to stderr and exit nonzero (2: configuration, 3: solver, 1: other).

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "stackgame/config.hpp"
#include "stackgame/errors.hpp"
#include "stackgame/pipeline.hpp"

namespace {

using stackgame::ConfigError;
using stackgame::RunConfig;

int fail(const std::string& kind, const std::string& field, const std::string& message,
         int code) {
  std::cerr << "error kind=" << kind << " field=" << (field.empty() ? "-" : field)
            << " message=" << nlohmann::json(message).dump() << '\n';
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg value iteration and stochastic Fisher market solver"};
  app.option_defaults()->always_capture_default();
  std::string config_path;
  std::string preset;
  std::string mode;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool dump = false;
  bool list = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--preset", preset, "Named preset used as the base configuration");
  app.add_option("--mode", mode, "solve-grid, solve-fisher, evaluate, verify or bound");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (config default: 1)")->default_str("");
  app.add_option("--out", out, "Output directory");
  auto* threads_opt = app.add_option("--threads", threads, "Worker cap, 0 for hardware concurrency (config default: 1)")
                         ->default_str("");
  app.add_flag("--dump-config", dump, "Print the effective configuration and exit");
  app.add_flag("--list-presets", list, "Print preset names and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("UsageError", "", e.what(), 2);
  }

  if (list) {
    for (const auto& name : stackgame::preset_names()) std::cout << name << '\n';
    return 0;
  }

  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) doc = stackgame::parse_config_text(read_file(config_path));
    RunConfig cfg = stackgame::config_from_json(doc, preset);
    if (!mode.empty()) {
      doc = stackgame::config_to_json(cfg);
      doc["mode"] = mode;
      cfg = stackgame::config_from_json(doc);
    }
    if (*seed_opt) cfg.seed = seed;
    if (!out.empty()) cfg.out = out;
    if (*threads_opt) {
      cfg.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    }
    if (dump) {
      std::cout << stackgame::config_to_json(cfg).dump(2) << '\n';
      return 0;
    }
    std::cout << stackgame::run_pipeline(cfg) << '\n';
    return 0;
  } catch (const ConfigError& e) {
    return fail("ConfigError", e.field(), e.what(), 2);
  } catch (const stackgame::SolverError& e) {
    return fail(e.kind(), "", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("Error", "", e.what(), 1);
  }
}
