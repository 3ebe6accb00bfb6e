#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "stackgame/core.hpp"
#include "stackgame/fisher.hpp"

namespace stackgame {

// ---------------------------------------------------------------------------
// Exhaustive grid search
// ---------------------------------------------------------------------------

struct GridOracleConfig {
  std::vector<std::size_t> outer_resolution{5};
  std::vector<std::size_t> inner_resolution{5};
  double feas_tol = kDefaultFeasTol;

  void validate() const;
};

/// min over x_grid of max over feasible y in y_grid of f(x, y).
///
/// Ties: the lowest-index outer action wins; among inner maximizers the
/// first (lowest-index) one is returned, which in a zero-sum stage game is
/// also a maximizer of the outer player's objective. An outer action with no
/// feasible inner action is excluded; if every outer action is excluded
/// this throws InfeasibleState.
StagePair grid_minmax(const StageObjective& f, const StageConstraint& g,
                      const std::vector<Vec>& x_grid,
                      const std::vector<Vec>& y_grid,
                      double feas_tol = kDefaultFeasTol);

bool is_feasible(const Vec& constraint_values, double feas_tol);

class GridOracle final : public MinMaxOracle {
 public:
  GridOracle(std::vector<Vec> x_grid, std::vector<Vec> y_grid,
             double feas_tol = kDefaultFeasTol);

  /// Discretizes the game's action spaces with the configured resolutions.
  static GridOracle for_game(const StochasticGame& game,
                             const GridOracleConfig& cfg = {});

  StagePair solve(const StageObjective& f,
                  const StageConstraint& g) const override;
  double feas_tol() const noexcept override { return feas_tol_; }

  const std::vector<Vec>& outer_grid() const noexcept { return x_grid_; }
  const std::vector<Vec>& inner_grid() const noexcept { return y_grid_; }

 private:
  std::vector<Vec> x_grid_;
  std::vector<Vec> y_grid_;
  double feas_tol_;
};

// ---------------------------------------------------------------------------
// Budget-set projection and nested GDA for Fisher stage problems
// ---------------------------------------------------------------------------

/// Euclidean projection of one buyer's (x, s) onto
/// {(x, s) >= 0 : p·x + s <= budget}. Writes the result in place.
void project_buyer(Eigen::Ref<Eigen::VectorXd> alloc, double& saving,
                   const Eigen::VectorXd& prices, double budget);

/// Row-wise projection of (X, s) onto every buyer's budget set.
void project_budget_set(Eigen::MatrixXd& alloc, Eigen::VectorXd& savings,
                        const Eigen::VectorXd& prices,
                        const Eigen::VectorXd& budgets);

/// How the savings step differentiates the continuation γ E[V(R + ρ s)].
enum class SavingsGradient {
  /// γ E[ρ] ∂V/∂b_i: the chain rule through the interest-rate dynamics.
  ExpectedRate,
  /// γ ∂V/∂b_i with no rate factor, the update as literally stated for the
  /// nested GDA; identical to ExpectedRate when E[ρ] = 1.
  BudgetDerivative,
};

struct GdaConfig {
  double eta_p = 1.5e-2;
  double eta_x = 1.4;
  int outer_iters = 60;
  int inner_iters = 100;
  double excess_demand_break = 0.01;
  double utility_floor = kDefaultUtilityFloor;
  SavingsGradient savings_gradient = SavingsGradient::ExpectedRate;

  void validate() const;
};

struct StagePoint {
  StageAction action;
  /// Stage objective plus discounted continuation at the returned point.
  double value = 0.0;
  int outer_iterations = 0;
  double excess_demand_norm = 0.0;
  bool early_stopped = false;
};

/// Outer projected descent on prices wrapped around an inner projected
/// ascent on allocations and savings. `v` must be LinearInBudget (its
/// budget derivative drives the savings step). Without a warm start the
/// iterate starts from uniform prices Σb/Σq, an equal split of each
/// buyer's budget across goods, and zero savings.
StagePoint nested_gda_fisher(const FisherMarket& market,
                             const MarketState& state,
                             const StateValueFunction& v, const GdaConfig& cfg,
                             const StageAction* warm_start = nullptr);

/// Named presets carrying the per-utility-class learning rates.
GdaConfig gda_preset(UtilityClass kind, bool with_interest);

}  // namespace stackgame
