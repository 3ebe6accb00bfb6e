#include "stackgame/config.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "stackgame/errors.hpp"
#include "stackgame/seeding.hpp"
#include "stackgame/toy_games.hpp"

namespace stackgame {

using nlohmann::json;

const char* to_string(SavingsGradient g) {
  switch (g) {
    case SavingsGradient::ExpectedRate: return "expected-rate";
    case SavingsGradient::BudgetDerivative: return "budget-derivative";
  }
  return "unknown";
}

SavingsGradient savings_gradient_from_string(const std::string& name) {
  if (name == "expected-rate") return SavingsGradient::ExpectedRate;
  if (name == "budget-derivative") return SavingsGradient::BudgetDerivative;
  throw std::invalid_argument("unknown savings gradient '" + name +
                              "' (expected-rate, budget-derivative)");
}

FisherMarket build_market(const MarketSpec& spec, std::uint64_t seed) {
  if (spec.n_buyers == 0 || spec.n_goods == 0) {
    throw ConfigError("market", "n_buyers and n_goods must be positive");
  }
  if (spec.valuations.empty() &&
      !(spec.valuation_lo >= 0.0 && spec.valuation_lo < spec.valuation_hi)) {
    throw ConfigError("market.valuation_range", "needs 0 <= lo < hi");
  }
  FisherMarket m;
  const auto n_goods = static_cast<Eigen::Index>(spec.n_goods);
  if (!spec.valuations.empty() && spec.valuations.size() != spec.n_buyers) {
    throw ConfigError("market.valuations", "needs one row per buyer");
  }
  auto rng = make_stream(seed, "valuations");
  for (std::size_t i = 0; i < spec.n_buyers; ++i) {
    Eigen::VectorXd theta(n_goods);
    if (!spec.valuations.empty()) {
      if (spec.valuations[i].size() != spec.n_goods) {
        throw ConfigError("market.valuations", "row " + std::to_string(i) +
                                                   " needs n_goods entries");
      }
      for (Eigen::Index j = 0; j < n_goods; ++j) {
        theta[j] = spec.valuations[i][static_cast<std::size_t>(j)];
      }
    } else {
      for (Eigen::Index j = 0; j < n_goods; ++j) {
        theta[j] = uniform(rng, spec.valuation_lo, spec.valuation_hi);
      }
    }
    try {
      m.utilities.push_back(UtilitySpec::make(spec.utility, theta, spec.utility_scale));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("market.valuations", e.what());
    }
  }
  if (spec.supply.empty()) {
    m.supply = Eigen::VectorXd::Ones(n_goods);
  } else {
    if (spec.supply.size() != spec.n_goods) {
      throw ConfigError("market.supply", "needs n_goods entries");
    }
    m.supply = Eigen::Map<const Eigen::VectorXd>(spec.supply.data(), n_goods);
  }
  m.discount = spec.discount;
  m.dynamics.replenish = spec.replenish;
  m.dynamics.rates = spec.interest_rates;
  m.initial_budgets =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(spec.n_buyers), spec.initial_budget);
  m.utility_floor = spec.utility_floor;
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("market", e.what());
  }
  return m;
}

StochasticGame build_game(const GameSpec& spec) {
  if (spec.name == "toy") return make_toy_game(spec.discount);
  if (spec.name == "three-state") return make_three_state_game(spec.discount);
  throw ConfigError("game.name", "unknown game '" + spec.name + "' (toy, three-state)");
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kClasses[] = {"linear", "cobb-douglas", "leontief"};

RunConfig small_market(UtilityClass kind) {
  RunConfig c;
  c.market.utility = kind;
  c.market.n_buyers = 2;
  c.market.n_goods = 2;
  c.market.valuation_lo = 10.0;
  c.market.valuation_hi = 50.0;
  c.gda = gda_preset(kind, false);
  c.gda.outer_iters = 500;
  switch (kind) {
    case UtilityClass::Linear:
      c.market.utility_scale = 1.0;
      break;
    case UtilityClass::CobbDouglas:
      c.market.utility_scale = 10.0;
      c.gda.eta_x = 0.05;
      break;
    case UtilityClass::Leontief:
      c.market.utility_scale = 500.0;
      c.gda.eta_x = 1e-3;
      break;
  }
  return c;
}

RunConfig big_market(UtilityClass kind) {
  RunConfig c;
  c.market.utility = kind;
  c.market.n_buyers = 5;
  c.market.n_goods = 5;
  c.market.valuation_lo = 0.0;
  c.market.valuation_hi = 1.0;
  c.market.interest_rates = {{0.9, 0.2}, {1.0, 0.2}, {1.1, 0.2}, {1.2, 0.2}, {1.5, 0.2}};
  c.gda = gda_preset(kind, true);
  c.gda.outer_iters = 500;
  c.gda.savings_gradient = SavingsGradient::BudgetDerivative;
  switch (kind) {
    case UtilityClass::Linear:
      c.market.utility_scale = 30.0;
      break;
    case UtilityClass::CobbDouglas:
      c.market.utility_scale = 10.0;
      c.gda.eta_x = 0.05;
      break;
    case UtilityClass::Leontief:
      c.market.utility_scale = 15.0;
      c.gda.eta_x = 1e-3;
      break;
  }
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const char* size : {"paper-small-", "paper-big-"}) {
    for (const char* cls : kClasses) out.push_back(std::string(size) + cls);
  }
  return out;
}

RunConfig preset_config(const std::string& name) {
  for (const char* cls : kClasses) {
    if (name == std::string("paper-small-") + cls) {
      RunConfig c = small_market(utility_class_from_string(cls));
      c.preset = name;
      return c;
    }
    if (name == std::string("paper-big-") + cls) {
      RunConfig c = big_market(utility_class_from_string(cls));
      c.preset = name;
      return c;
    }
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON reading
// ---------------------------------------------------------------------------

namespace {

// Reads the keys of one JSON object and rejects any it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type: ") + e.what());
    }
  }

  template <class T>
  void read_positive(const char* key, T& out) {
    read(key, out);
    if (!(out > T{0})) throw ConfigError(field(key), "must be positive");
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_range(ObjectReader& r, const char* key, double& lo, double& hi) {
  const json* j = r.child(key);
  if (!j) return;
  if (!j->is_array() || j->size() != 2 || !(*j)[0].is_number() || !(*j)[1].is_number()) {
    throw ConfigError(r.field(key), "expected [lo, hi]");
  }
  lo = (*j)[0].get<double>();
  hi = (*j)[1].get<double>();
}

void read_market(const json& j, MarketSpec& m) {
  ObjectReader r(j, "market");
  std::string utility = to_string(m.utility);
  r.read("utility", utility);
  try {
    m.utility = utility_class_from_string(utility);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("market.utility", e.what());
  }
  r.read("n_buyers", m.n_buyers);
  r.read("n_goods", m.n_goods);
  r.read("utility_scale", m.utility_scale);
  read_range(r, "valuation_range", m.valuation_lo, m.valuation_hi);
  r.read("valuations", m.valuations);
  r.read("supply", m.supply);
  r.read("discount", m.discount);
  r.read("replenish", m.replenish);
  if (const json* rates = r.child("interest_rates")) {
    if (!rates->is_array() || rates->empty()) {
      throw ConfigError("market.interest_rates", "expected a nonempty list of [rate, probability]");
    }
    m.interest_rates.clear();
    for (const auto& pair : *rates) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        throw ConfigError("market.interest_rates", "expected [rate, probability] pairs");
      }
      m.interest_rates.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
  }
  r.read("initial_budget", m.initial_budget);
  r.read("utility_floor", m.utility_floor);
  r.finish();
}

void read_gda(const json& j, GdaConfig& g) {
  ObjectReader r(j, "gda");
  r.read("eta_x", g.eta_x);
  r.read("eta_p", g.eta_p);
  r.read("outer_iters", g.outer_iters);
  r.read("inner_iters", g.inner_iters);
  r.read("excess_demand_break", g.excess_demand_break);
  r.read("utility_floor", g.utility_floor);
  std::string sg = to_string(g.savings_gradient);
  r.read("savings_gradient", sg);
  try {
    g.savings_gradient = savings_gradient_from_string(sg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gda.savings_gradient", e.what());
  }
  r.finish();
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gda", e.what());
  }
}

void read_fitted_vi(const json& j, FittedViConfig& f) {
  ObjectReader r(j, "fitted_vi");
  r.read("n_budget_samples", f.n_budget_samples);
  read_range(r, "budget_range", f.budget_lo, f.budget_hi);
  r.read("n_value_iters", f.n_value_iters);
  r.read("warm_start", f.warm_start);
  r.finish();
}

void read_evaluate(const json& j, EvaluateConfig& e) {
  ObjectReader r(j, "evaluate");
  r.read_positive("horizon", e.horizon);
  r.read_positive("n_paths", e.n_paths);
  r.read("warm_start", e.warm_start);
  r.read("best_response_starts", e.best_response.n_starts);
  r.read_positive("best_response_iters", e.best_response.max_iters);
  r.finish();
}

void read_grid(const json& j, GridOracleConfig& g) {
  ObjectReader r(j, "grid");
  r.read("outer_resolution", g.outer_resolution);
  r.read("inner_resolution", g.inner_resolution);
  r.read("feas_tol", g.feas_tol);
  r.finish();
}

void read_vi(const json& j, ViConfig& v) {
  ObjectReader r(j, "vi");
  r.read_positive("max_iters", v.max_iters);
  r.read("sup_norm_tol", v.sup_norm_tol);
  r.finish();
}

const std::set<std::string> kModes = {"solve-grid", "solve-fisher", "evaluate", "verify", "bound"};

}  // namespace

RunConfig config_from_json(const json& doc, const std::string& base_preset) {
  ObjectReader r(doc, "");
  std::string name = base_preset;
  if (const json* p = r.child("preset")) {
    if (!p->is_string()) throw ConfigError("preset", "expected a string");
    if (base_preset.empty()) name = p->get<std::string>();
  }
  RunConfig cfg = name.empty() ? RunConfig{} : preset_config(name);

  r.read("mode", cfg.mode);
  if (!kModes.count(cfg.mode)) throw ConfigError("mode", "unknown mode '" + cfg.mode + "'");
  r.read("seed", cfg.seed);
  r.read("threads", cfg.threads);
  r.read("out", cfg.out);
  r.read("value_function", cfg.value_function);
  if (const json* j = r.child("market")) read_market(*j, cfg.market);
  if (const json* j = r.child("gda")) read_gda(*j, cfg.gda);
  if (const json* j = r.child("fitted_vi")) read_fitted_vi(*j, cfg.fitted_vi);
  if (const json* j = r.child("evaluate")) read_evaluate(*j, cfg.evaluate);
  if (const json* j = r.child("game")) {
    ObjectReader g(*j, "game");
    g.read("name", cfg.game.name);
    g.read("discount", cfg.game.discount);
    g.finish();
  }
  if (const json* j = r.child("grid")) read_grid(*j, cfg.grid);
  if (const json* j = r.child("vi")) read_vi(*j, cfg.vi);
  if (const json* j = r.child("bound")) {
    ObjectReader b(*j, "bound");
    b.read("epsilon", cfg.bound.epsilon);
    b.read("gamma", cfg.bound.gamma);
    b.read("reward_bound", cfg.bound.reward_bound);
    b.finish();
  }
  r.finish();
  return cfg;
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config", "syntax error at line " + std::to_string(line) + ", column " +
                                    std::to_string(col));
  }
}

json config_to_json(const RunConfig& c) {
  json rates = json::array();
  for (const auto& r : c.market.interest_rates) rates.push_back({r.rate, r.probability});
  json market = {
      {"utility", to_string(c.market.utility)},
      {"n_buyers", c.market.n_buyers},
      {"n_goods", c.market.n_goods},
      {"utility_scale", c.market.utility_scale},
      {"valuation_range", {c.market.valuation_lo, c.market.valuation_hi}},
      {"discount", c.market.discount},
      {"replenish", c.market.replenish},
      {"interest_rates", rates},
      {"initial_budget", c.market.initial_budget},
      {"utility_floor", c.market.utility_floor},
  };
  if (!c.market.valuations.empty()) market["valuations"] = c.market.valuations;
  if (!c.market.supply.empty()) market["supply"] = c.market.supply;

  json out = {
      {"mode", c.mode},
      {"seed", c.seed},
      {"threads", c.threads},
      {"out", c.out},
      {"market", market},
      {"gda",
       {{"eta_x", c.gda.eta_x},
        {"eta_p", c.gda.eta_p},
        {"outer_iters", c.gda.outer_iters},
        {"inner_iters", c.gda.inner_iters},
        {"excess_demand_break", c.gda.excess_demand_break},
        {"utility_floor", c.gda.utility_floor},
        {"savings_gradient", to_string(c.gda.savings_gradient)}}},
      {"fitted_vi",
       {{"n_budget_samples", c.fitted_vi.n_budget_samples},
        {"budget_range", {c.fitted_vi.budget_lo, c.fitted_vi.budget_hi}},
        {"n_value_iters", c.fitted_vi.n_value_iters},
        {"warm_start", c.fitted_vi.warm_start}}},
      {"evaluate",
       {{"horizon", c.evaluate.horizon},
        {"n_paths", c.evaluate.n_paths},
        {"warm_start", c.evaluate.warm_start},
        {"best_response_starts", c.evaluate.best_response.n_starts},
        {"best_response_iters", c.evaluate.best_response.max_iters}}},
      {"game", {{"name", c.game.name}, {"discount", c.game.discount}}},
      {"grid",
       {{"outer_resolution", c.grid.outer_resolution},
        {"inner_resolution", c.grid.inner_resolution},
        {"feas_tol", c.grid.feas_tol}}},
      {"vi", {{"max_iters", c.vi.max_iters}, {"sup_norm_tol", c.vi.sup_norm_tol}}},
      {"bound",
       {{"epsilon", c.bound.epsilon},
        {"gamma", c.bound.gamma},
        {"reward_bound", c.bound.reward_bound}}},
  };
  if (!c.preset.empty()) out["preset"] = c.preset;
  if (!c.value_function.empty()) out["value_function"] = c.value_function;
  return out;
}

}  // namespace stackgame
