#pragma once

// Stochastic Fisher markets with savings. Buyers split their budget between
// spending on divisible goods and savings that carry into the next state's
// budget (scaled by a random interest rate) on top of a fixed replenishment.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stackgame/core.hpp"

namespace stackgame {

inline constexpr double kDefaultUtilityFloor = 1e-9;

enum class UtilityClass { Linear, CobbDouglas, Leontief };

const char* to_string(UtilityClass kind);
/// Accepts "linear", "cobb-douglas", "leontief".
UtilityClass utility_class_from_string(const std::string& name);

struct UtilitySpec {
  UtilityClass kind = UtilityClass::Linear;
  Eigen::VectorXd theta;
  /// Positive multiplicative coefficient; keeps degree-1 homogeneity.
  double scale = 1.0;

  /// Validates theta > 0 and normalizes Cobb-Douglas exponents to sum 1.
  static UtilitySpec make(UtilityClass kind, Eigen::VectorXd theta,
                          double scale = 1.0);
};

double utility_eval(const UtilitySpec& spec, const Eigen::VectorXd& x);

/// Gradient (Leontief: subgradient e_j*/θ_j* at the lowest argmin index).
/// Cobb-Douglas returns the zero vector when some x_j <= 0.
Eigen::VectorXd utility_grad(const UtilitySpec& spec, const Eigen::VectorXd& x);

/// Indirect utility per unit of money, max{u(x) : p·x <= 1}. Throws
/// std::domain_error when the maximum is unbounded (a relevant zero price).
double money_utility(const UtilitySpec& spec, const Eigen::VectorXd& prices);

struct InterestRate {
  double rate = 1.0;
  double probability = 1.0;
};

struct BudgetDynamics {
  double replenish = 9.5;
  std::vector<InterestRate> rates{{1.0, 1.0}};

  double expected_rate() const;
};

struct MarketState {
  Eigen::VectorXd budgets;
};

struct StageAction {
  Eigen::VectorXd prices;   // m
  Eigen::MatrixXd alloc;    // n x m
  Eigen::VectorXd savings;  // n
};

struct FisherMarket {
  std::vector<UtilitySpec> utilities;  // one per buyer
  Eigen::VectorXd supply;
  double discount = 0.9;
  BudgetDynamics dynamics;
  Eigen::VectorXd initial_budgets;
  double utility_floor = kDefaultUtilityFloor;

  std::size_t n_buyers() const { return utilities.size(); }
  std::size_t n_goods() const { return static_cast<std::size_t>(supply.size()); }

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Σ_j q_j p_j + Σ_i (b_i − s_i) log max(u_i(X_i), floor).
double stage_payoff(const FisherMarket& market, const MarketState& state,
                    const StageAction& action);

/// γ E[V(replenish + ρ s)] for a LinearInBudget V.
double continuation_value(const FisherMarket& market,
                          const StateValueFunction& v,
                          const Eigen::VectorXd& savings);

/// ∂/∂s_i of E[V(replenish + ρ s)], i.e. E[ρ]·a_i.
Eigen::VectorXd continuation_gradient(const FisherMarket& market,
                                      const StateValueFunction& v);

struct Transition {
  MarketState next;
  double rate = 1.0;
};

Transition transition_sample(const FisherMarket& market,
                             const MarketState& state,
                             const Eigen::VectorXd& savings,
                             std::mt19937_64& rng);

std::vector<std::pair<MarketState, double>> transition_support(
    const FisherMarket& market, const MarketState& state,
    const Eigen::VectorXd& savings);

struct RecceResiduals {
  /// max_j |p_j (Σ_i x_ij − q_j)|
  double clearing_value = 0.0;
  /// max_j (Σ_i x_ij − q_j)_+
  double excess_demand = 0.0;
  /// max over buyers and purchased goods of the relative bang-per-buck gap.
  double bpb_spread = 0.0;
  /// |Σ_i (b_i − s_i − X_i·p)|
  double walras = 0.0;
  /// max over saving buyers of |∂V/∂b_i − γ ∂/∂s_i E[V(b')]|, using the
  /// solver's (social) value function.
  double saving = 0.0;
  /// Some buyer spends at most utility_floor; bpb_spread skips that buyer.
  bool degenerate = false;
};

struct RecceTolerances {
  double purchase_tol = 1e-6;
  double saving_tol = 1e-6;
};

using StagePolicy = std::function<StageAction(const MarketState&)>;

RecceResiduals recce_residuals(const FisherMarket& market,
                               const StateValueFunction& v,
                               const MarketState& state,
                               const StageAction& action,
                               const RecceTolerances& tol = {});

std::vector<RecceResiduals> verify_recce(
    const FisherMarket& market, const StateValueFunction& v,
    const StagePolicy& policy, const std::vector<MarketState>& eval_states,
    const RecceTolerances& tol = {});

}  // namespace stackgame
