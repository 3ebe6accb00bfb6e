#pragma once
// Batch pipelines behind the command-line modes. Each writes its CSV/JSON
// artifacts into cfg.out and returns a short human-readable summary.

#include <string>

#include "stackgame/config.hpp"

namespace stackgame {

/// values.csv: iter, v_1..v_S, sup_norm_delta (row 0 is v_0).
std::string run_solve_grid(const RunConfig& cfg);

/// trajectory.csv: iter, mean_value, fit_a_1..n, fit_c, max_residual;
/// value_function.json: the fitted (a, c) plus the market's valuations.
std::string run_solve_fisher(const RunConfig& cfg);

/// rollout.csv: t, budget_1..n, price_1..m, excess_demand_norm,
/// realized_rate. report.csv: one row per buyer with u_hat, u_star and the
/// run-level distances and residuals repeated on every row.
std::string run_evaluate(const RunConfig& cfg);

/// verify.csv: per rollout step recCE residuals under the fitted V.
std::string run_verify(const RunConfig& cfg);

/// iterations_needed(epsilon, gamma, reward_bound) as a decimal string.
std::string run_bound(const RunConfig& cfg);

/// Dispatches on cfg.mode.
std::string run_pipeline(const RunConfig& cfg);

}  // namespace stackgame
