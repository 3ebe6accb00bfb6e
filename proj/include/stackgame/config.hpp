#pragma once
// Run configuration for the command-line front end: named presets, JSON
// parsing with field-level errors, and an effective-config dump that loads
// back to the same parameters.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "stackgame/eval.hpp"
#include "stackgame/fisher.hpp"
#include "stackgame/oracles.hpp"
#include "stackgame/solver.hpp"

namespace stackgame {

struct MarketSpec {
  UtilityClass utility = UtilityClass::Linear;
  std::size_t n_buyers = 2;
  std::size_t n_goods = 2;
  double utility_scale = 1.0;
  /// Valuations are drawn uniformly from [lo, hi) unless given explicitly.
  double valuation_lo = 10.0;
  double valuation_hi = 50.0;
  std::vector<Vec> valuations;
  /// Empty means all ones.
  Vec supply;
  double discount = 0.9;
  double replenish = 9.5;
  std::vector<InterestRate> interest_rates{{1.0, 1.0}};
  double initial_budget = 10.0;
  double utility_floor = kDefaultUtilityFloor;
};

/// Valuations come from the stream derive_seed(seed, "valuations") when the
/// MarketSpec does not list them.
FisherMarket build_market(const MarketSpec& spec, std::uint64_t seed);

struct BoundSpec {
  double epsilon = 0.01;
  double gamma = 0.9;
  double reward_bound = 1.0;
};

struct GameSpec {
  /// "toy" (two states) or "three-state".
  std::string name = "toy";
  double discount = 0.9;
};

StochasticGame build_game(const GameSpec& spec);

struct RunConfig {
  /// solve-grid, solve-fisher, evaluate, verify or bound.
  std::string mode = "solve-fisher";
  std::string preset;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = "out";
  /// Input for evaluate/verify; empty means <out>/value_function.json.
  std::string value_function;

  MarketSpec market;
  GdaConfig gda;
  FittedViConfig fitted_vi;
  EvaluateConfig evaluate;

  GameSpec game;
  GridOracleConfig grid;
  ViConfig vi;

  BoundSpec bound;
};

std::vector<std::string> preset_names();

/// Throws ConfigError("preset", ...) for an unknown name.
RunConfig preset_config(const std::string& name);

/// Overlays `doc` on the named preset (doc["preset"] or `base_preset`) or on
/// the defaults. Unknown keys and mistyped values throw ConfigError naming
/// the dotted field path.
RunConfig config_from_json(const nlohmann::json& doc,
                           const std::string& base_preset = "");

/// Parses JSON text; syntax errors throw ConfigError with line and column.
nlohmann::json parse_config_text(const std::string& text);

nlohmann::json config_to_json(const RunConfig& cfg);

const char* to_string(SavingsGradient g);
SavingsGradient savings_gradient_from_string(const std::string& name);

}  // namespace stackgame
