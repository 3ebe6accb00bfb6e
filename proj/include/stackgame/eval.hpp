#pragma once

// Greedy rollouts and exploitability of a computed market equilibrium:
// the normalized distance to utility maximization (UM) and the distance to
// market clearance (MC).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "stackgame/fisher.hpp"
#include "stackgame/oracles.hpp"

namespace stackgame {

struct TrajectoryStep {
  Eigen::VectorXd budgets;
  StageAction action;
  /// Interest rate applied to this step's savings on the way to step t+1.
  double realized_rate = 1.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;

  std::size_t size() const { return steps.size(); }
};

/// Solves each stage with nested GDA under `v`, then samples the transition.
/// Rates come from the stream derive_seed(seed, "rollout", path).
Trajectory rollout_greedy(const FisherMarket& market,
                          const StateValueFunction& v, const GdaConfig& gda,
                          int horizon, std::uint64_t seed,
                          std::uint64_t path = 0, bool warm_start = true);

struct BestResponseConfig {
  int n_starts = 8;
  int max_iters = 400;
  std::uint64_t seed = 0;
};

/// Best attainable Σ_t γ^t u_i(x_t) for one buyer facing a fixed price path,
/// subject to x_t·p_t + s_t <= b_t and b_{t+1} = replenish + ρ_t s_t.
///
/// Degree-1 homogeneity reduces within-step choice to u = β_t·(b_t − s_t)
/// with β_t the indirect utility per unit money; the horizon program over
/// savings fractions is solved by projected gradient ascent from the
/// supplied start (if any) plus n_starts seeded interior starts.
double best_response_value(const FisherMarket& market, std::size_t buyer,
                           const std::vector<Eigen::VectorXd>& prices,
                           const Vec& rates, double initial_budget,
                           double gamma, const BestResponseConfig& cfg = {},
                           const Vec* start_fractions = nullptr);

/// Same, reading prices, rates and b_0 from a rollout and starting one
/// ascent at the buyer's realized savings fractions.
double best_response_value(const FisherMarket& market,
                           const Trajectory& trajectory, std::size_t buyer,
                           double gamma, const BestResponseConfig& cfg = {});

/// û_i = Σ_t γ^t u_i(X_i^t) along the rollout.
Eigen::VectorXd realized_utilities(const FisherMarket& market,
                                   const Trajectory& trajectory, double gamma);

/// ||û − u*||₂ / ||u*||₂; throws std::domain_error when u* = 0.
double distance_to_um(const Eigen::VectorXd& u_hat,
                      const Eigen::VectorXd& u_star);

/// (1/T) Σ_t ||Σ_i X_i^t − q||₂; throws std::invalid_argument on an empty
/// trajectory.
double distance_to_mc(const Trajectory& trajectory,
                      const Eigen::VectorXd& supply);

struct EquilibriumReport {
  Eigen::VectorXd u_hat;
  Eigen::VectorXd u_star;
  double distance_to_um = 0.0;
  double distance_to_mc = 0.0;
  /// Worst recCE residuals over the rollout's states.
  RecceResiduals residuals;
  /// Averages over n_paths independent rollouts (path 0 included).
  Eigen::VectorXd u_hat_mean;
  Eigen::VectorXd u_star_mean;
  double distance_to_um_mean = 0.0;
};

struct EvaluateConfig {
  int horizon = 50;
  int n_paths = 10;
  bool warm_start = true;
  BestResponseConfig best_response;
};

struct Evaluation {
  Trajectory trajectory;  // path 0
  EquilibriumReport report;
};

Evaluation evaluate_equilibrium(const FisherMarket& market,
                                const StateValueFunction& v,
                                const GdaConfig& gda, const EvaluateConfig& cfg,
                                std::uint64_t seed);

}  // namespace stackgame
