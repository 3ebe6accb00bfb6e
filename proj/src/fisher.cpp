#include "stackgame/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stackgame/seeding.hpp"

namespace stackgame {

const char* to_string(UtilityClass kind) {
  switch (kind) {
    case UtilityClass::Linear: return "linear";
    case UtilityClass::CobbDouglas: return "cobb-douglas";
    case UtilityClass::Leontief: return "leontief";
  }
  return "unknown";
}

UtilityClass utility_class_from_string(const std::string& name) {
  if (name == "linear") return UtilityClass::Linear;
  if (name == "cobb-douglas") return UtilityClass::CobbDouglas;
  if (name == "leontief") return UtilityClass::Leontief;
  throw std::invalid_argument("unknown utility class '" + name + "'");
}

UtilitySpec UtilitySpec::make(UtilityClass kind, Eigen::VectorXd theta,
                              double scale) {
  if (theta.size() == 0) throw std::invalid_argument("empty valuation vector");
  if ((theta.array() <= 0.0).any() || !theta.allFinite()) {
    throw std::invalid_argument("valuations must be positive and finite");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("utility scale must be positive");
  }
  if (kind == UtilityClass::CobbDouglas) theta /= theta.sum();
  return UtilitySpec{kind, std::move(theta), scale};
}

namespace {

Eigen::Index leontief_argmin(const UtilitySpec& spec, const Eigen::VectorXd& x) {
  Eigen::Index best = 0;
  double best_ratio = x[0] / spec.theta[0];
  for (Eigen::Index j = 1; j < x.size(); ++j) {
    const double ratio = x[j] / spec.theta[j];
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = j;
    }
  }
  return best;
}

void check_dims(const UtilitySpec& spec, Eigen::Index n) {
  if (spec.theta.size() != n) {
    throw std::invalid_argument("bundle and valuation dimensions differ");
  }
}

}  // namespace

double utility_eval(const UtilitySpec& spec, const Eigen::VectorXd& x) {
  check_dims(spec, x.size());
  switch (spec.kind) {
    case UtilityClass::Linear:
      return spec.scale * spec.theta.dot(x);
    case UtilityClass::CobbDouglas: {
      if ((x.array() <= 0.0).any()) return 0.0;
      return spec.scale * std::exp((spec.theta.array() * x.array().log()).sum());
    }
    case UtilityClass::Leontief: {
      const Eigen::Index j = leontief_argmin(spec, x);
      return spec.scale * x[j] / spec.theta[j];
    }
  }
  return 0.0;
}

Eigen::VectorXd utility_grad(const UtilitySpec& spec, const Eigen::VectorXd& x) {
  check_dims(spec, x.size());
  switch (spec.kind) {
    case UtilityClass::Linear:
      return spec.scale * spec.theta;
    case UtilityClass::CobbDouglas: {
      if ((x.array() <= 0.0).any()) return Eigen::VectorXd::Zero(x.size());
      const double u = utility_eval(spec, x);
      return (u * spec.theta.array() / x.array()).matrix();
    }
    case UtilityClass::Leontief: {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
      const Eigen::Index j = leontief_argmin(spec, x);
      g[j] = spec.scale / spec.theta[j];
      return g;
    }
  }
  return Eigen::VectorXd::Zero(x.size());
}

double money_utility(const UtilitySpec& spec, const Eigen::VectorXd& prices) {
  check_dims(spec, prices.size());
  if ((prices.array() < 0.0).any()) throw std::domain_error("negative price");
  switch (spec.kind) {
    case UtilityClass::Linear: {
      if ((prices.array() <= 0.0).any()) {
        throw std::domain_error("zero price makes linear demand unbounded");
      }
      return spec.scale * (spec.theta.array() / prices.array()).maxCoeff();
    }
    case UtilityClass::CobbDouglas: {
      if ((prices.array() <= 0.0).any()) {
        throw std::domain_error("zero price makes Cobb-Douglas demand unbounded");
      }
      const double log_beta =
          (spec.theta.array() * (spec.theta.array() / prices.array()).log()).sum();
      return spec.scale * std::exp(log_beta);
    }
    case UtilityClass::Leontief: {
      const double cost = spec.theta.dot(prices);
      if (!(cost > 0.0)) throw std::domain_error("all relevant prices are zero");
      return spec.scale / cost;
    }
  }
  return 0.0;
}

double BudgetDynamics::expected_rate() const {
  double e = 0.0;
  for (const auto& r : rates) e += r.rate * r.probability;
  return e;
}

void FisherMarket::validate() const {
  const auto n = static_cast<Eigen::Index>(n_buyers());
  const auto m = supply.size();
  if (n == 0 || m == 0) throw std::invalid_argument("market needs buyers and goods");
  if ((supply.array() <= 0.0).any()) throw std::invalid_argument("supply must be positive");
  for (const auto& u : utilities) {
    if (u.theta.size() != m) throw std::invalid_argument("valuation length must equal n_goods");
    if ((u.theta.array() <= 0.0).any()) throw std::invalid_argument("valuations must be positive");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("discount must lie in [0, 1)");
  }
  if (!(dynamics.replenish >= 0.0)) throw std::invalid_argument("replenish must be >= 0");
  if (dynamics.rates.empty()) throw std::invalid_argument("interest distribution is empty");
  double mass = 0.0;
  for (const auto& r : dynamics.rates) {
    if (!(r.probability >= 0.0) || !(r.rate >= 0.0)) {
      throw std::invalid_argument("interest rates and probabilities must be >= 0");
    }
    mass += r.probability;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::invalid_argument("interest probabilities must sum to 1");
  }
  if (initial_budgets.size() != n || (initial_budgets.array() < 0.0).any()) {
    throw std::invalid_argument("initial budgets must be nonnegative, one per buyer");
  }
  if (!(utility_floor > 0.0)) throw std::invalid_argument("utility_floor must be > 0");
}

double stage_payoff(const FisherMarket& market, const MarketState& state,
                    const StageAction& action) {
  double value = market.supply.dot(action.prices);
  for (std::size_t i = 0; i < market.n_buyers(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double weight = state.budgets[ii] - action.savings[ii];
    if (weight == 0.0) continue;
    const double u = utility_eval(market.utilities[i], action.alloc.row(ii).transpose());
    value += weight * std::log(std::max(u, market.utility_floor));
  }
  return value;
}

double continuation_value(const FisherMarket& market,
                          const StateValueFunction& v,
                          const Eigen::VectorXd& savings) {
  if (market.discount == 0.0) return 0.0;
  const auto& lin = v.linear();
  const double rate = market.dynamics.expected_rate();
  double expected = lin.c;
  for (Eigen::Index i = 0; i < savings.size(); ++i) {
    expected += lin.a[static_cast<std::size_t>(i)] *
                (market.dynamics.replenish + rate * savings[i]);
  }
  return market.discount * expected;
}

Eigen::VectorXd continuation_gradient(const FisherMarket& market,
                                      const StateValueFunction& v) {
  const auto& lin = v.linear();
  const double rate = market.dynamics.expected_rate();
  Eigen::VectorXd g(static_cast<Eigen::Index>(lin.a.size()));
  for (std::size_t i = 0; i < lin.a.size(); ++i) {
    g[static_cast<Eigen::Index>(i)] = rate * lin.a[i];
  }
  return g;
}

Transition transition_sample(const FisherMarket& market,
                             const MarketState& state,
                             const Eigen::VectorXd& savings,
                             std::mt19937_64& rng) {
  (void)state;
  const auto& rates = market.dynamics.rates;
  double rate = rates.back().rate;
  if (rates.size() > 1) {
    const double draw = uniform(rng);
    double cum = 0.0;
    for (const auto& r : rates) {
      cum += r.probability;
      if (draw < cum) {
        rate = r.rate;
        break;
      }
    }
  }
  Eigen::VectorXd next =
      (market.dynamics.replenish + rate * savings.array()).matrix();
  return Transition{MarketState{std::move(next)}, rate};
}

std::vector<std::pair<MarketState, double>> transition_support(
    const FisherMarket& market, const MarketState& state,
    const Eigen::VectorXd& savings) {
  (void)state;
  std::vector<std::pair<MarketState, double>> out;
  for (const auto& r : market.dynamics.rates) {
    Eigen::VectorXd next =
        (market.dynamics.replenish + r.rate * savings.array()).matrix();
    out.emplace_back(MarketState{std::move(next)}, r.probability);
  }
  return out;
}

RecceResiduals recce_residuals(const FisherMarket& market,
                               const StateValueFunction& v,
                               const MarketState& state,
                               const StageAction& action,
                               const RecceTolerances& tol) {
  RecceResiduals res;
  const Eigen::VectorXd demand = action.alloc.colwise().sum().transpose();
  const Eigen::VectorXd excess = demand - market.supply;
  res.clearing_value = (action.prices.array() * excess.array()).abs().maxCoeff();
  res.excess_demand = std::max(0.0, excess.maxCoeff());
  res.walras = std::abs(
      (state.budgets - action.savings - action.alloc * action.prices).sum());

  for (std::size_t i = 0; i < market.n_buyers(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const UtilitySpec& spec = market.utilities[i];
    const double spend = state.budgets[ii] - action.savings[ii];
    if (spend <= market.utility_floor) {
      res.degenerate = true;
      continue;
    }
    const Eigen::VectorXd x = action.alloc.row(ii).transpose();
    // Best utility per unit money at these prices; by homogeneity an optimal
    // bundle attains it, so every purchased good must too.
    double target = 0.0;
    try {
      target = money_utility(spec, action.prices);
    } catch (const std::domain_error&) {
      res.degenerate = true;
      continue;
    }
    if (spec.kind == UtilityClass::Leontief) {
      // Bundle proportional to θ: compare u/(b−s) with 1/(θ·p) directly.
      const double avg = utility_eval(spec, x) / spend;
      res.bpb_spread = std::max(res.bpb_spread, std::abs(avg - target) / target);
      continue;
    }
    const Eigen::VectorXd grad = utility_grad(spec, x);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (x[j] <= tol.purchase_tol) continue;
      const double bpb = action.prices[j] > 0.0
                             ? grad[j] / action.prices[j]
                             : std::numeric_limits<double>::infinity();
      res.bpb_spread = std::max(res.bpb_spread, std::abs(bpb - target) / target);
    }
  }

  if (v.is_linear()) {
    const Eigen::VectorXd dnext = continuation_gradient(market, v);
    const auto& a = v.linear().a;
    for (std::size_t i = 0; i < market.n_buyers(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (action.savings[ii] <= tol.saving_tol) continue;
      res.saving = std::max(res.saving, std::abs(a[i] - market.discount * dnext[ii]));
    }
  }
  return res;
}

std::vector<RecceResiduals> verify_recce(
    const FisherMarket& market, const StateValueFunction& v,
    const StagePolicy& policy, const std::vector<MarketState>& eval_states,
    const RecceTolerances& tol) {
  std::vector<RecceResiduals> out;
  out.reserve(eval_states.size());
  for (const auto& state : eval_states) {
    out.push_back(recce_residuals(market, v, state, policy(state), tol));
  }
  return out;
}

}  // namespace stackgame
