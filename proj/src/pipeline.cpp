#include "stackgame/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stackgame/csv.hpp"
#include "stackgame/errors.hpp"

namespace stackgame {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("out", "cannot create output directory '" + cfg.out + "'");
  }
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("out", "cannot write '" + path.string() + "'");
  return os;
}

std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(stem + std::to_string(k));
  return out;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

fs::path value_function_path(const RunConfig& cfg) {
  return cfg.value_function.empty() ? fs::path(cfg.out) / "value_function.json"
                                    : fs::path(cfg.value_function);
}

json valuations_json(const FisherMarket& market) {
  json rows = json::array();
  for (const auto& u : market.utilities) {
    rows.push_back(Vec(u.theta.data(), u.theta.data() + u.theta.size()));
  }
  return rows;
}

// Loads a fitted V and checks it was produced for the market that `cfg`
// builds (same valuations after normalization).
LinearInBudget load_value_function(const RunConfig& cfg, const FisherMarket& market) {
  const fs::path path = value_function_path(cfg);
  std::ifstream is(path);
  if (!is) throw ConfigError("value_function", "cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  json doc;
  try {
    doc = parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError("value_function", path.string() + " " + e.what());
  }
  LinearInBudget v;
  try {
    v.a = doc.at("a").get<Vec>();
    v.c = doc.at("c").get<double>();
    if (doc.at("valuations") != valuations_json(market)) {
      throw ConfigError("value_function",
                        "was fitted for a different market (check preset, market and seed)");
    }
  } catch (const json::exception& e) {
    throw ConfigError("value_function", std::string("malformed: ") + e.what());
  }
  if (v.a.size() != market.n_buyers()) {
    throw ConfigError("value_function", "dimension differs from n_buyers");
  }
  return v;
}

}  // namespace

std::string run_bound(const RunConfig& cfg) {
  try {
    return std::to_string(
        iterations_needed(cfg.bound.epsilon, cfg.bound.gamma, cfg.bound.reward_bound));
  } catch (const std::domain_error& e) {
    throw ConfigError("bound", e.what());
  }
}

std::string run_solve_grid(const RunConfig& cfg) {
  const StochasticGame game = build_game(cfg.game);
  const GridOracle oracle = GridOracle::for_game(game, cfg.grid);
  ViConfig vi = cfg.vi;
  vi.record_trajectory = true;
  vi.threads = cfg.threads;
  const ViResult res = value_iteration(game, oracle, Tabular{Vec(game.n_states, 0.0)}, vi);

  const fs::path dir = output_dir(cfg);
  auto os = open_out(dir / "values.csv");
  std::vector<std::string> header{"iter"};
  append(header, numbered("v_", game.n_states));
  header.push_back("sup_norm_delta");
  CsvWriter csv(os, header);
  for (std::size_t k = 0; k < res.iterates.size(); ++k) {
    csv.field(k);
    for (double x : res.iterates[k]) csv.field(x);
    csv.field(k == 0 ? 0.0 : res.sup_norm_deltas[k - 1]);
    csv.end_row();
  }
  std::ostringstream msg;
  msg << "value iteration: " << res.iterations << " iterations, "
      << (res.converged ? "converged" : "not converged");
  return msg.str();
}

std::string run_solve_fisher(const RunConfig& cfg) {
  const FisherMarket market = build_market(cfg.market, cfg.seed);
  FittedViConfig fc = cfg.fitted_vi;
  fc.seed = cfg.seed;
  fc.threads = cfg.threads;
  try {
    fc.validate(market.n_buyers());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("fitted_vi", e.what());
  }
  const FittedViResult res = fitted_value_iteration(market, cfg.gda, fc);

  const fs::path dir = output_dir(cfg);
  {
    auto os = open_out(dir / "trajectory.csv");
    std::vector<std::string> header{"iter", "mean_value"};
    append(header, numbered("fit_a_", market.n_buyers()));
    header.push_back("fit_c");
    header.push_back("max_residual");
    CsvWriter csv(os, header);
    for (std::size_t k = 0; k < res.diagnostics.size(); ++k) {
      const auto& d = res.diagnostics[k];
      csv.field(k + 1).field(d.mean_value);
      for (double a : d.fit.a) csv.field(a);
      csv.field(d.fit.c).field(d.max_residual);
      csv.end_row();
    }
  }
  {
    json doc = {{"a", res.v.a},
                {"c", res.v.c},
                {"seed", cfg.seed},
                {"utility", to_string(market.utilities.front().kind)},
                {"valuations", valuations_json(market)}};
    auto os = open_out(dir / "value_function.json");
    os << doc.dump(2) << '\n';
  }
  std::ostringstream msg;
  msg << "fitted value iteration: " << res.diagnostics.size() << " iterations, final mean value "
      << format_number(res.avg_value_trajectory.back());
  return msg.str();
}

std::string run_evaluate(const RunConfig& cfg) {
  const FisherMarket market = build_market(cfg.market, cfg.seed);
  const StateValueFunction v = load_value_function(cfg, market);
  const Evaluation ev = evaluate_equilibrium(market, v, cfg.gda, cfg.evaluate, cfg.seed);
  const EquilibriumReport& rep = ev.report;

  const fs::path dir = output_dir(cfg);
  {
    auto os = open_out(dir / "rollout.csv");
    std::vector<std::string> header{"t"};
    append(header, numbered("budget_", market.n_buyers()));
    append(header, numbered("price_", market.n_goods()));
    header.push_back("excess_demand_norm");
    header.push_back("realized_rate");
    CsvWriter csv(os, header);
    for (std::size_t t = 0; t < ev.trajectory.steps.size(); ++t) {
      const auto& step = ev.trajectory.steps[t];
      csv.field(t);
      for (double b : step.budgets) csv.field(b);
      for (double p : step.action.prices) csv.field(p);
      csv.field((step.action.alloc.colwise().sum().transpose() - market.supply).norm());
      csv.field(step.realized_rate);
      csv.end_row();
    }
  }
  {
    auto os = open_out(dir / "report.csv");
    CsvWriter csv(os, {"buyer", "u_hat", "u_star", "distance_to_um", "distance_to_mc",
                       "walras_residual", "bpb_spread", "u_hat_mean", "u_star_mean",
                       "distance_to_um_mean"});
    for (Eigen::Index i = 0; i < rep.u_hat.size(); ++i) {
      csv.field(static_cast<std::size_t>(i + 1))
          .field(rep.u_hat[i])
          .field(rep.u_star[i])
          .field(rep.distance_to_um)
          .field(rep.distance_to_mc)
          .field(rep.residuals.walras)
          .field(rep.residuals.bpb_spread)
          .field(rep.u_hat_mean[i])
          .field(rep.u_star_mean[i])
          .field(rep.distance_to_um_mean);
      csv.end_row();
    }
  }
  std::ostringstream msg;
  msg << "distance_to_um " << format_number(rep.distance_to_um) << ", distance_to_mc "
      << format_number(rep.distance_to_mc) << ", distance_to_um over " << cfg.evaluate.n_paths
      << " paths " << format_number(rep.distance_to_um_mean);
  return msg.str();
}

std::string run_verify(const RunConfig& cfg) {
  const FisherMarket market = build_market(cfg.market, cfg.seed);
  const StateValueFunction v = load_value_function(cfg, market);
  const Trajectory traj = rollout_greedy(market, v, cfg.gda, cfg.evaluate.horizon, cfg.seed, 0,
                                         cfg.evaluate.warm_start);
  const fs::path dir = output_dir(cfg);
  auto os = open_out(dir / "verify.csv");
  CsvWriter csv(os, {"t", "clearing_value", "excess_demand", "bpb_spread", "walras_residual",
                     "saving_residual", "degenerate"});
  RecceResiduals worst;
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const auto& step = traj.steps[t];
    const RecceResiduals r = recce_residuals(market, v, MarketState{step.budgets}, step.action);
    csv.field(t)
        .field(r.clearing_value)
        .field(r.excess_demand)
        .field(r.bpb_spread)
        .field(r.walras)
        .field(r.saving)
        .field(r.degenerate ? 1 : 0);
    csv.end_row();
    worst.excess_demand = std::max(worst.excess_demand, r.excess_demand);
    worst.bpb_spread = std::max(worst.bpb_spread, r.bpb_spread);
  }
  std::ostringstream msg;
  msg << "worst excess demand " << format_number(worst.excess_demand)
      << ", worst bang-per-buck spread " << format_number(worst.bpb_spread);
  return msg.str();
}

std::string run_pipeline(const RunConfig& cfg) {
  if (cfg.mode == "bound") return run_bound(cfg);
  if (cfg.mode == "solve-grid") return run_solve_grid(cfg);
  if (cfg.mode == "solve-fisher") return run_solve_fisher(cfg);
  if (cfg.mode == "evaluate") return run_evaluate(cfg);
  if (cfg.mode == "verify") return run_verify(cfg);
  throw ConfigError("mode", "unknown mode '" + cfg.mode + "'");
}

}  // namespace stackgame
