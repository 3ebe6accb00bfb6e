#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "stackgame/core.hpp"
#include "stackgame/fisher.hpp"
#include "stackgame/oracles.hpp"

namespace stackgame {

// ---------------------------------------------------------------------------
// Exact value iteration on finite games
// ---------------------------------------------------------------------------

struct ViConfig {
  int max_iters = 1000;
  double sup_norm_tol = 1e-8;
  bool record_trajectory = false;
  unsigned threads = 1;

  void validate() const;
};

struct ViResult {
  StateValueFunction v_final;
  /// v_0, v_1, ... when record_trajectory is set.
  std::vector<Vec> iterates;
  /// ||v_{k+1} − v_k||∞ for each performed iteration.
  Vec sup_norm_deltas;
  int iterations = 0;
  bool converged = false;
};

ViResult value_iteration(const StochasticGame& game, const MinMaxOracle& oracle,
                         const StateValueFunction& v0, const ViConfig& cfg);

/// Smallest integer k >= (1/(1−γ)) ln(r̄ / (ε(1−γ))), clamped at 0.
/// Throws std::domain_error for ε <= 0, γ outside (0,1) or r̄ <= 0.
long iterations_needed(double epsilon, double gamma, double reward_bound);

// ---------------------------------------------------------------------------
// Fitted value iteration over continuous budgets
// ---------------------------------------------------------------------------

struct FittedViConfig {
  std::size_t n_budget_samples = 25;
  double budget_lo = 9.0;
  double budget_hi = 10.0;
  int n_value_iters = 30;
  std::uint64_t seed = 0;
  /// Seed each stage solve with the previous iteration's solution at the
  /// nearest sampled budget.
  bool warm_start = false;
  unsigned threads = 1;

  void validate(std::size_t n_buyers) const;
};

struct FitDiagnostics {
  LinearInBudget fit;
  double mean_value = 0.0;
  double max_residual = 0.0;
  int resamples = 0;
};

struct FittedViResult {
  LinearInBudget v;
  Vec avg_value_trajectory;
  std::vector<FitDiagnostics> diagnostics;
};

/// Solves one stage min-max at a sampled state under the current value
/// function, optionally warm started.
using StageSolver = std::function<StagePoint(
    const MarketState&, const StateValueFunction&, const StageAction*)>;

FittedViResult fitted_value_iteration(const FisherMarket& market,
                                      const GdaConfig& gda,
                                      const FittedViConfig& cfg);

FittedViResult fitted_value_iteration(const FisherMarket& market,
                                      const StageSolver& stage,
                                      const FittedViConfig& cfg);

/// Ordinary least squares of values on features (b, 1). Throws
/// RegressionSingular when the design matrix is rank deficient.
LinearInBudget fit_linear_in_budget(const std::vector<Eigen::VectorXd>& budgets,
                                    const Vec& values, double* max_residual);

}  // namespace stackgame
