#include "stackgame/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stackgame/errors.hpp"
#include "stackgame/seeding.hpp"

namespace stackgame {

Trajectory rollout_greedy(const FisherMarket& market,
                          const StateValueFunction& v, const GdaConfig& gda,
                          int horizon, std::uint64_t seed, std::uint64_t path,
                          bool warm_start) {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be >= 1");
  market.validate();
  auto rng = make_stream(seed, "rollout", path);
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(horizon));
  MarketState state{market.initial_budgets};
  for (int t = 0; t < horizon; ++t) {
    const StageAction* warm = warm_start && t > 0 ? &traj.steps.back().action : nullptr;
    StagePoint point;
    try {
      point = nested_gda_fisher(market, state, v, gda, warm);
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), std::string(e.what()) + " (rollout step " +
                                      std::to_string(t) + ")");
    }
    Transition next = transition_sample(market, state, point.action.savings, rng);
    traj.steps.push_back(TrajectoryStep{state.budgets, std::move(point.action), next.rate});
    state = std::move(next.next);
  }
  return traj;
}

namespace {

// Σ_t γ^t β_t (1 − f_t) b_t along b_{t+1} = R + ρ_t f_t b_t, and its
// gradient in the savings fractions f (adjoint recursion).
struct HorizonProgram {
  Vec weight;  // γ^t β_t
  Vec rates;
  double replenish = 0.0;
  double b0 = 0.0;

  double value(const Vec& f, Vec* grad) const {
    const std::size_t T = weight.size();
    Vec b(T);
    double total = 0.0;
    double budget = b0;
    for (std::size_t t = 0; t < T; ++t) {
      b[t] = budget;
      total += weight[t] * (1.0 - f[t]) * budget;
      budget = replenish + rates[t] * f[t] * budget;
    }
    if (grad) {
      grad->assign(T, 0.0);
      double adj = 0.0;  // ∂J/∂b_{t+1}
      for (std::size_t t = T; t-- > 0;) {
        (*grad)[t] = b[t] * (-weight[t] + adj * rates[t]);
        adj = weight[t] * (1.0 - f[t]) + adj * rates[t] * f[t];
      }
    }
    return total;
  }

  double ascend(Vec f, int max_iters) const {
    Vec grad;
    double current = value(f, &grad);
    double step = 1.0;
    for (int it = 0; it < max_iters && step > 1e-12; ++it) {
      double scale = 0.0;
      for (double g : grad) scale = std::max(scale, std::abs(g));
      if (scale == 0.0) break;
      Vec trial(f.size());
      for (std::size_t t = 0; t < f.size(); ++t) {
        trial[t] = std::clamp(f[t] + step * grad[t] / scale, 0.0, 1.0);
      }
      Vec trial_grad;
      const double candidate = value(trial, &trial_grad);
      if (candidate > current) {
        f = std::move(trial);
        grad = std::move(trial_grad);
        current = candidate;
        step = std::min(1.0, 2.0 * step);
      } else {
        step *= 0.5;
      }
    }
    return current;
  }
};

}  // namespace

double best_response_value(const FisherMarket& market, std::size_t buyer,
                           const std::vector<Eigen::VectorXd>& prices,
                           const Vec& rates, double initial_budget,
                           double gamma, const BestResponseConfig& cfg,
                           const Vec* start_fractions) {
  if (buyer >= market.n_buyers()) throw std::out_of_range("buyer index");
  if (prices.empty() || rates.size() != prices.size()) {
    throw std::invalid_argument("price path and rate path must share a nonzero length");
  }
  HorizonProgram prog;
  prog.rates = rates;
  prog.replenish = market.dynamics.replenish;
  prog.b0 = initial_budget;
  prog.weight.resize(prices.size());
  double discount = 1.0;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    try {
      prog.weight[t] = discount * money_utility(market.utilities[buyer], prices[t]);
    } catch (const std::domain_error& e) {
      throw DegenerateState("best response for buyer " + std::to_string(buyer) +
                            " at step " + std::to_string(t) + ": " + e.what());
    }
    discount *= gamma;
  }

  double best = prog.ascend(Vec(prices.size(), 0.0), cfg.max_iters);
  if (start_fractions) {
    if (start_fractions->size() != prices.size()) {
      throw std::invalid_argument("start fractions have wrong length");
    }
    best = std::max(best, prog.ascend(*start_fractions, cfg.max_iters));
  }
  auto rng = make_stream(cfg.seed, "best-response", buyer);
  for (int k = 0; k < cfg.n_starts; ++k) {
    Vec f(prices.size());
    for (double& x : f) x = uniform(rng);
    best = std::max(best, prog.ascend(std::move(f), cfg.max_iters));
  }
  if (!std::isfinite(best)) throw NonFiniteIterate("best response", 0);
  return best;
}

double best_response_value(const FisherMarket& market,
                           const Trajectory& trajectory, std::size_t buyer,
                           double gamma, const BestResponseConfig& cfg) {
  if (trajectory.steps.empty()) throw std::invalid_argument("empty trajectory");
  std::vector<Eigen::VectorXd> prices;
  Vec rates;
  Vec fractions;
  const auto i = static_cast<Eigen::Index>(buyer);
  for (const auto& step : trajectory.steps) {
    prices.push_back(step.action.prices);
    rates.push_back(step.realized_rate);
    const double b = step.budgets[i];
    fractions.push_back(b > 0.0 ? std::clamp(step.action.savings[i] / b, 0.0, 1.0) : 0.0);
  }
  return best_response_value(market, buyer, prices, rates,
                             trajectory.steps.front().budgets[i], gamma, cfg,
                             &fractions);
}

Eigen::VectorXd realized_utilities(const FisherMarket& market,
                                   const Trajectory& trajectory, double gamma) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(market.n_buyers()));
  double discount = 1.0;
  for (const auto& step : trajectory.steps) {
    for (std::size_t i = 0; i < market.n_buyers(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      out[ii] += discount * utility_eval(market.utilities[i],
                                         step.action.alloc.row(ii).transpose());
    }
    discount *= gamma;
  }
  return out;
}

double distance_to_um(const Eigen::VectorXd& u_hat, const Eigen::VectorXd& u_star) {
  if (u_hat.size() != u_star.size()) throw std::invalid_argument("utility vectors differ in length");
  const double denom = u_star.norm();
  if (!(denom > 0.0)) throw std::domain_error("best-response utilities are all zero");
  return (u_hat - u_star).norm() / denom;
}

double distance_to_mc(const Trajectory& trajectory, const Eigen::VectorXd& supply) {
  if (trajectory.steps.empty()) throw std::invalid_argument("empty trajectory");
  double total = 0.0;
  for (const auto& step : trajectory.steps) {
    total += (step.action.alloc.colwise().sum().transpose() - supply).norm();
  }
  return total / static_cast<double>(trajectory.steps.size());
}

Evaluation evaluate_equilibrium(const FisherMarket& market,
                                const StateValueFunction& v,
                                const GdaConfig& gda, const EvaluateConfig& cfg,
                                std::uint64_t seed) {
  if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  const auto n = static_cast<Eigen::Index>(market.n_buyers());
  const double gamma = market.discount;
  Evaluation out;
  EquilibriumReport& rep = out.report;
  rep.u_hat_mean = Eigen::VectorXd::Zero(n);
  rep.u_star_mean = Eigen::VectorXd::Zero(n);
  BestResponseConfig br = cfg.best_response;
  br.seed = derive_seed(seed, "best-response-starts");

  for (int path = 0; path < cfg.n_paths; ++path) {
    Trajectory traj = rollout_greedy(market, v, gda, cfg.horizon, seed,
                                     static_cast<std::uint64_t>(path), cfg.warm_start);
    const Eigen::VectorXd u_hat = realized_utilities(market, traj, gamma);
    Eigen::VectorXd u_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      u_star[i] = best_response_value(market, traj, static_cast<std::size_t>(i), gamma, br);
    }
    rep.u_hat_mean += u_hat;
    rep.u_star_mean += u_star;
    if (path == 0) {
      rep.u_hat = u_hat;
      rep.u_star = u_star;
      rep.distance_to_um = distance_to_um(u_hat, u_star);
      rep.distance_to_mc = distance_to_mc(traj, market.supply);
      for (const auto& step : traj.steps) {
        const RecceResiduals r =
            recce_residuals(market, v, MarketState{step.budgets}, step.action);
        rep.residuals.clearing_value = std::max(rep.residuals.clearing_value, r.clearing_value);
        rep.residuals.excess_demand = std::max(rep.residuals.excess_demand, r.excess_demand);
        rep.residuals.bpb_spread = std::max(rep.residuals.bpb_spread, r.bpb_spread);
        rep.residuals.walras = std::max(rep.residuals.walras, r.walras);
        rep.residuals.saving = std::max(rep.residuals.saving, r.saving);
        rep.residuals.degenerate = rep.residuals.degenerate || r.degenerate;
      }
      out.trajectory = std::move(traj);
    }
  }
  rep.u_hat_mean /= static_cast<double>(cfg.n_paths);
  rep.u_star_mean /= static_cast<double>(cfg.n_paths);
  rep.distance_to_um_mean = distance_to_um(rep.u_hat_mean, rep.u_star_mean);
  return out;
}

}  // namespace stackgame
