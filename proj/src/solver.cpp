#include "stackgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stackgame/errors.hpp"
#include "stackgame/parallel.hpp"
#include "stackgame/seeding.hpp"

namespace stackgame {

void ViConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(sup_norm_tol >= 0.0)) throw std::invalid_argument("sup_norm_tol must be >= 0");
}

ViResult value_iteration(const StochasticGame& game, const MinMaxOracle& oracle,
                         const StateValueFunction& v0, const ViConfig& cfg) {
  game.validate();
  cfg.validate();
  if (!v0.is_tabular() || v0.tabular().values.size() != game.n_states) {
    throw std::invalid_argument("value iteration needs a tabular v0 over the game's states");
  }
  ViResult res;
  Vec current = v0.tabular().values;
  if (cfg.record_trajectory) res.iterates.push_back(current);
  for (int k = 1; k <= cfg.max_iters; ++k) {
    Vec next;
    try {
      next = apply_operator(game, Tabular{current}, oracle, cfg.threads).tabular().values;
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), std::string(e.what()) + " (value iteration step " +
                                      std::to_string(k) + ")");
    }
    double delta = 0.0;
    for (std::size_t s = 0; s < next.size(); ++s) {
      delta = std::max(delta, std::abs(next[s] - current[s]));
    }
    current = std::move(next);
    res.sup_norm_deltas.push_back(delta);
    res.iterations = k;
    if (cfg.record_trajectory) res.iterates.push_back(current);
    if (delta < cfg.sup_norm_tol) {
      res.converged = true;
      break;
    }
  }
  res.v_final = Tabular{std::move(current)};
  return res;
}

long iterations_needed(double epsilon, double gamma, double reward_bound) {
  if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in (0, 1)");
  if (!(reward_bound > 0.0)) throw std::domain_error("reward_bound must be positive");
  const double k = std::log(reward_bound / (epsilon * (1.0 - gamma))) / (1.0 - gamma);
  if (k <= 0.0) return 0;
  // Guard against ceil() bumping an exact integer that picked up rounding.
  const double nearest = std::round(k);
  if (std::abs(k - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<long>(nearest);
  }
  return static_cast<long>(std::ceil(k));
}

// ---------------------------------------------------------------------------

void FittedViConfig::validate(std::size_t n_buyers) const {
  if (n_budget_samples <= n_buyers + 1) {
    throw std::invalid_argument("n_budget_samples must exceed n_buyers + 1");
  }
  if (!(budget_lo < budget_hi)) throw std::invalid_argument("budget box needs lo < hi");
  if (budget_lo < 0.0) throw std::invalid_argument("budgets must be nonnegative");
  if (n_value_iters < 1) throw std::invalid_argument("n_value_iters must be >= 1");
}

LinearInBudget fit_linear_in_budget(const std::vector<Eigen::VectorXd>& budgets,
                                    const Vec& values, double* max_residual) {
  if (budgets.empty() || budgets.size() != values.size()) {
    throw std::invalid_argument("regression needs one value per sampled budget");
  }
  const auto rows = static_cast<Eigen::Index>(budgets.size());
  const Eigen::Index dim = budgets.front().size();
  Eigen::MatrixXd design(rows, dim + 1);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    design.row(r).head(dim) = budgets[static_cast<std::size_t>(r)].transpose();
    design(r, dim) = 1.0;
    target[r] = values[static_cast<std::size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < dim + 1) {
    throw RegressionSingular("budget design matrix has rank " +
                             std::to_string(qr.rank()) + " < " +
                             std::to_string(dim + 1));
  }
  const Eigen::VectorXd coef = qr.solve(target);
  if (max_residual) *max_residual = (design * coef - target).cwiseAbs().maxCoeff();
  LinearInBudget fit;
  fit.a.assign(coef.data(), coef.data() + dim);
  fit.c = coef[dim];
  return fit;
}

namespace {

std::vector<Eigen::VectorXd> sample_budgets(const FittedViConfig& cfg,
                                            std::size_t n_buyers, int iter,
                                            int attempt) {
  auto rng = make_stream(cfg.seed, "fitted-vi-budgets",
                         static_cast<std::uint64_t>(iter) * 16 +
                             static_cast<std::uint64_t>(attempt));
  std::vector<Eigen::VectorXd> out(cfg.n_budget_samples,
                                   Eigen::VectorXd(static_cast<Eigen::Index>(n_buyers)));
  for (auto& b : out) {
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      b[i] = uniform(rng, cfg.budget_lo, cfg.budget_hi);
    }
  }
  return out;
}

std::size_t nearest(const std::vector<Eigen::VectorXd>& pool,
                    const Eigen::VectorXd& b) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const double d = (pool[k] - b).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

}  // namespace

FittedViResult fitted_value_iteration(const FisherMarket& market,
                                      const GdaConfig& gda,
                                      const FittedViConfig& cfg) {
  const StageSolver stage = [&](const MarketState& s, const StateValueFunction& v,
                                const StageAction* warm) {
    return nested_gda_fisher(market, s, v, gda, warm);
  };
  return fitted_value_iteration(market, stage, cfg);
}

FittedViResult fitted_value_iteration(const FisherMarket& market,
                                      const StageSolver& stage,
                                      const FittedViConfig& cfg) {
  market.validate();
  const std::size_t n = market.n_buyers();
  cfg.validate(n);

  FittedViResult res;
  res.v = LinearInBudget{Vec(n, 0.0), 0.0};
  std::vector<Eigen::VectorXd> prev_budgets;
  std::vector<StageAction> prev_actions;

  for (int iter = 0; iter < cfg.n_value_iters; ++iter) {
    const StateValueFunction current = res.v;
    FitDiagnostics diag;
    std::vector<Eigen::VectorXd> budgets;
    Vec values;
    std::vector<StageAction> actions;
    for (int attempt = 0;; ++attempt) {
      budgets = sample_budgets(cfg, n, iter, attempt);
      values.assign(budgets.size(), 0.0);
      actions.assign(budgets.size(), StageAction{});
      try {
        parallel_for(budgets.size(), cfg.threads, [&](std::size_t k) {
          const StageAction* warm = nullptr;
          if (cfg.warm_start && !prev_budgets.empty()) {
            warm = &prev_actions[nearest(prev_budgets, budgets[k])];
          }
          StagePoint point = stage(MarketState{budgets[k]}, current, warm);
          values[k] = point.value;
          actions[k] = std::move(point.action);
        });
      } catch (const SolverError& e) {
        throw SolverError(e.kind(), std::string(e.what()) + " (fitted value iteration " +
                                        std::to_string(iter) + ")");
      }
      try {
        diag.fit = fit_linear_in_budget(budgets, values, &diag.max_residual);
        diag.resamples = attempt;
        break;
      } catch (const RegressionSingular&) {
        if (attempt >= 1) throw;
      }
    }
    double mean = 0.0;
    for (double val : values) mean += val;
    diag.mean_value = mean / static_cast<double>(values.size());
    res.v = diag.fit;
    res.avg_value_trajectory.push_back(diag.mean_value);
    res.diagnostics.push_back(std::move(diag));
    prev_budgets = std::move(budgets);
    prev_actions = std::move(actions);
  }
  return res;
}

}  // namespace stackgame
