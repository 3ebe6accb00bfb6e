#include "stackgame/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stackgame/errors.hpp"
#include "stackgame/parallel.hpp"

namespace stackgame {

ActionSpace ActionSpace::box(Vec lower, Vec upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw std::invalid_argument("box bounds must be nonempty and equal length");
  }
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!(lower[k] <= upper[k])) {
      throw std::invalid_argument("box requires lower <= upper");
    }
  }
  ActionSpace space;
  space.dimension_ = lower.size();
  space.lower_ = std::move(lower);
  space.upper_ = std::move(upper);
  return space;
}

ActionSpace ActionSpace::grid(std::vector<Vec> points) {
  if (points.empty()) throw std::invalid_argument("grid must be nonempty");
  const std::size_t dim = points.front().size();
  if (dim == 0) throw std::invalid_argument("grid points need a dimension");
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw std::invalid_argument("grid points differ in dimension");
    }
  }
  std::vector<Vec> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("grid contains duplicate points");
  }
  ActionSpace space;
  space.dimension_ = dim;
  space.points_ = std::move(points);
  return space;
}

bool ActionSpace::contains(std::span<const double> action, double tol) const {
  if (action.size() != dimension_) return false;
  if (is_box()) {
    for (std::size_t k = 0; k < dimension_; ++k) {
      if (action[k] < lower_[k] - tol || action[k] > upper_[k] + tol) {
        return false;
      }
    }
    return true;
  }
  return std::any_of(points_.begin(), points_.end(), [&](const Vec& p) {
    for (std::size_t k = 0; k < dimension_; ++k) {
      if (std::abs(p[k] - action[k]) > tol) return false;
    }
    return true;
  });
}

std::vector<Vec> ActionSpace::discretize(
    std::span<const std::size_t> resolution) const {
  if (!is_box()) return points_;
  if (resolution.size() != dimension_) {
    throw std::invalid_argument("resolution length must match dimension");
  }
  std::vector<Vec> axes(dimension_);
  std::size_t total = 1;
  for (std::size_t k = 0; k < dimension_; ++k) {
    const std::size_t r = resolution[k];
    if (r < 2) throw std::invalid_argument("grid resolution must be >= 2");
    axes[k].resize(r);
    for (std::size_t i = 0; i < r; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(r - 1);
      axes[k][i] = lower_[k] + t * (upper_[k] - lower_[k]);
    }
    axes[k].back() = upper_[k];
    total *= r;
  }
  std::vector<Vec> out;
  out.reserve(total);
  std::vector<std::size_t> idx(dimension_, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vec point(dimension_);
    for (std::size_t k = 0; k < dimension_; ++k) point[k] = axes[k][idx[k]];
    out.push_back(std::move(point));
    for (std::size_t k = dimension_; k-- > 0;) {
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
    }
  }
  return out;
}

void StochasticGame::validate() const {
  if (n_states == 0) throw std::invalid_argument("game needs at least one state");
  // γ = 0 is admitted for one-shot (stage game) reductions.
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("discount must lie in [0, 1)");
  }
  if (!(reward_bound >= 0.0)) {
    throw std::invalid_argument("reward_bound must be nonnegative");
  }
  if (!reward || !constraints || !transition) {
    throw std::invalid_argument("game callables must be set");
  }
}

double StateValueFunction::at_state(std::size_t state) const {
  if (!is_tabular()) {
    throw std::logic_error("state lookup on a linear-in-budget value function");
  }
  return tabular().values.at(state);
}

double StateValueFunction::at_budget(std::span<const double> budgets) const {
  if (!is_linear()) {
    throw std::logic_error("budget evaluation on a tabular value function");
  }
  const auto& lin = linear();
  if (budgets.size() != lin.a.size()) {
    throw std::invalid_argument("budget dimension does not match value function");
  }
  double out = lin.c;
  for (std::size_t i = 0; i < budgets.size(); ++i) out += lin.a[i] * budgets[i];
  return out;
}

double q_from_v(const StochasticGame& game, const StateValueFunction& v,
                std::size_t state, const Vec& x, const Vec& y) {
  const double r = game.reward(state, x, y);
  if (std::abs(r) > game.reward_bound * (1.0 + 1e-12) + 1e-12) {
    throw std::invalid_argument("reward " + std::to_string(r) +
                                " exceeds reward_bound at state " +
                                std::to_string(state));
  }
  if (game.discount == 0.0) return r;
  const Vec probs = game.transition(state, x, y);
  if (probs.size() != game.n_states) {
    throw std::invalid_argument("transition vector has wrong length");
  }
  double mass = 0.0;
  double expected = 0.0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    if (probs[s] < 0.0) throw std::invalid_argument("negative transition probability");
    mass += probs[s];
    if (probs[s] != 0.0) expected += probs[s] * v.at_state(s);
  }
  if (std::abs(mass - 1.0) > kTransitionTol) {
    throw std::invalid_argument("transition probabilities do not sum to 1");
  }
  const double q = r + game.discount * expected;
  if (!std::isfinite(q)) {
    throw SolverError("NonFinite", "non-finite action value at state " +
                                       std::to_string(state));
  }
  return q;
}

StagePair bellman_backup(const StochasticGame& game,
                         const StateValueFunction& v, std::size_t state,
                         const MinMaxOracle& oracle) {
  const StageObjective f = [&](const Vec& x, const Vec& y) {
    return q_from_v(game, v, state, x, y);
  };
  const StageConstraint g = [&](const Vec& x, const Vec& y) {
    return game.constraints(state, x, y);
  };
  try {
    return oracle.solve(f, g);
  } catch (const InfeasibleState&) {
    throw InfeasibleState(state);
  }
}

StateValueFunction apply_operator(const StochasticGame& game,
                                  const StateValueFunction& v,
                                  const MinMaxOracle& oracle, unsigned threads) {
  if (!v.is_tabular() || v.tabular().values.size() != game.n_states) {
    throw std::invalid_argument("apply_operator needs a tabular v over the game's states");
  }
  Vec out(game.n_states, 0.0);
  parallel_for(game.n_states, threads, [&](std::size_t s) {
    out[s] = bellman_backup(game, v, s, oracle).value;
  });
  return Tabular{std::move(out)};
}

PolicyProfile greedy_policy(const StochasticGame& game,
                            const StateValueFunction& v,
                            const MinMaxOracle& oracle, unsigned threads) {
  PolicyProfile profile;
  profile.outer.resize(game.n_states);
  profile.inner.resize(game.n_states);
  parallel_for(game.n_states, threads, [&](std::size_t s) {
    StagePair pair = bellman_backup(game, v, s, oracle);
    profile.outer[s] = std::move(pair.outer);
    profile.inner[s] = std::move(pair.inner);
  });
  return profile;
}

}  // namespace stackgame
