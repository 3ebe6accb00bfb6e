#include <cmath>
#include <stdexcept>

#include "stackgame/errors.hpp"
#include "stackgame/oracles.hpp"

namespace stackgame {

void GdaConfig::validate() const {
  if (!(eta_p > 0.0) || !(eta_x > 0.0)) {
    throw std::invalid_argument("GDA step sizes must be positive");
  }
  if (outer_iters < 1 || inner_iters < 1) {
    throw std::invalid_argument("GDA iteration counts must be >= 1");
  }
  if (!(excess_demand_break >= 0.0)) {
    throw std::invalid_argument("excess_demand_break must be >= 0");
  }
  if (!(utility_floor > 0.0)) throw std::invalid_argument("utility_floor must be > 0");
}

GdaConfig gda_preset(UtilityClass kind, bool with_interest) {
  GdaConfig cfg;
  switch (kind) {
    case UtilityClass::Linear:
      cfg.eta_x = with_interest ? 1.7 : 1.4;
      cfg.eta_p = with_interest ? 2e-2 : 1.5e-2;
      break;
    case UtilityClass::Leontief:
      cfg.eta_x = with_interest ? 2.0 : 1.5;
      cfg.eta_p = with_interest ? 5e-5 : 6.5e-4;
      break;
    case UtilityClass::CobbDouglas:
      cfg.eta_x = with_interest ? 1.8 : 1.4;
      cfg.eta_p = with_interest ? 2.5e-2 : 5e-3;
      break;
  }
  return cfg;
}

namespace {

StageAction cold_start(const FisherMarket& market, const MarketState& state) {
  const auto n = static_cast<Eigen::Index>(market.n_buyers());
  const auto m = static_cast<Eigen::Index>(market.n_goods());
  const double money = state.budgets.sum();
  const double level = money > 0.0 ? money / market.supply.sum() : 1.0;
  StageAction a;
  a.prices = Eigen::VectorXd::Constant(m, level);
  a.alloc.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.alloc.row(i).setConstant(state.budgets[i] / (static_cast<double>(m) * level));
  }
  a.savings = Eigen::VectorXd::Zero(n);
  return a;
}

}  // namespace

StagePoint nested_gda_fisher(const FisherMarket& market,
                             const MarketState& state,
                             const StateValueFunction& v, const GdaConfig& cfg,
                             const StageAction* warm_start) {
  cfg.validate();
  if (!v.is_linear()) {
    throw std::invalid_argument(
        "nested GDA needs a budget-differentiable (linear-in-budget) value function");
  }
  const auto n = static_cast<Eigen::Index>(market.n_buyers());
  const auto m = static_cast<Eigen::Index>(market.n_goods());
  if (state.budgets.size() != n) throw std::invalid_argument("budget vector has wrong length");
  if (static_cast<Eigen::Index>(v.linear().a.size()) != n) {
    throw std::invalid_argument("value function dimension differs from n_buyers");
  }

  StageAction it = warm_start ? *warm_start : cold_start(market, state);
  if (it.prices.size() != m || it.alloc.rows() != n || it.alloc.cols() != m ||
      it.savings.size() != n) {
    throw std::invalid_argument("warm start has wrong dimensions");
  }
  it.prices = it.prices.cwiseMax(0.0);
  project_budget_set(it.alloc, it.savings, it.prices, state.budgets);

  Eigen::VectorXd save_drift = market.discount * continuation_gradient(market, v);
  if (cfg.savings_gradient == SavingsGradient::BudgetDerivative) {
    const double rate = market.dynamics.expected_rate();
    if (rate > 0.0) save_drift /= rate;
  }
  const double floor = cfg.utility_floor;

  StagePoint out;
  Eigen::MatrixXd step_x(n, m);
  Eigen::VectorXd step_s(n);
  for (int t = 1; t <= cfg.outer_iters; ++t) {
    for (int k = 0; k < cfg.inner_iters; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& spec = market.utilities[static_cast<std::size_t>(i)];
        const Eigen::VectorXd x = it.alloc.row(i).transpose();
        const double u = std::max(utility_eval(spec, x), floor);
        const double spend = state.budgets[i] - it.savings[i];
        step_x.row(i) = (spend / u) * utility_grad(spec, x).transpose();
        step_s[i] = -std::log(u) + save_drift[i];
      }
      it.alloc += cfg.eta_x * step_x;
      it.savings += cfg.eta_x * step_s;
      project_budget_set(it.alloc, it.savings, it.prices, state.budgets);
      if (!it.alloc.allFinite() || !it.savings.allFinite()) {
        throw NonFiniteIterate("nested GDA (allocations/savings)",
                               static_cast<long>(t) * cfg.inner_iters + k);
      }
    }
    const Eigen::VectorXd excess = it.alloc.colwise().sum().transpose() - market.supply;
    out.outer_iterations = t;
    out.excess_demand_norm = excess.norm();
    if (out.excess_demand_norm < cfg.excess_demand_break) {
      out.early_stopped = true;
      break;
    }
    if (t == cfg.outer_iters) break;
    it.prices = (it.prices + cfg.eta_p * excess).cwiseMax(0.0);
    if (!it.prices.allFinite()) throw NonFiniteIterate("nested GDA (prices)", t);
  }

  out.value = stage_payoff(market, state, it) + continuation_value(market, v, it.savings);
  if (!std::isfinite(out.value)) {
    throw NonFiniteIterate("nested GDA (stage value)", out.outer_iterations);
  }
  out.action = std::move(it);
  return out;
}

}  // namespace stackgame
