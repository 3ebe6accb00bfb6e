#pragma once

// Zero-sum stochastic Stackelberg games over a finite state set: the game
// tuple, value functions, and the per-state Bellman / greedy primitives.
//
// Convention: the outer player (leader) minimizes the reward, the inner
// player (follower) maximizes it subject to constraints(s, x, y) >= 0.

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace stackgame {

using Vec = std::vector<double>;

inline constexpr double kDefaultFeasTol = 1e-8;
inline constexpr double kTransitionTol = 1e-9;

class ActionSpace {
 public:
  /// Axis-aligned box; requires lower <= upper coordinatewise.
  static ActionSpace box(Vec lower, Vec upper);
  /// Explicit finite set; must be nonempty, duplicate-free, equal dimensions.
  static ActionSpace grid(std::vector<Vec> points);

  bool is_box() const noexcept { return points_.empty(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const Vec& lower() const noexcept { return lower_; }
  const Vec& upper() const noexcept { return upper_; }
  const std::vector<Vec>& points() const noexcept { return points_; }

  bool contains(std::span<const double> action, double tol = 1e-12) const;

  /// Finite action list. A box is sampled on a uniform lattice with
  /// `resolution[k]` points along coordinate k (first coordinate varies
  /// slowest); a grid space ignores `resolution` and returns its points.
  std::vector<Vec> discretize(std::span<const std::size_t> resolution) const;

 private:
  ActionSpace() = default;

  std::size_t dimension_ = 0;
  Vec lower_;
  Vec upper_;
  std::vector<Vec> points_;
};

struct StochasticGame {
  using Reward = std::function<double(std::size_t, const Vec&, const Vec&)>;
  using Constraints = std::function<Vec(std::size_t, const Vec&, const Vec&)>;
  using Transition = std::function<Vec(std::size_t, const Vec&, const Vec&)>;

  std::size_t n_states = 0;
  Reward reward;
  Constraints constraints;
  Transition transition;
  double discount = 0.9;
  double reward_bound = 1.0;
  ActionSpace outer_space = ActionSpace::box({0.0}, {1.0});
  ActionSpace inner_space = ActionSpace::box({0.0}, {1.0});

  /// Throws std::invalid_argument on a malformed tuple.
  void validate() const;

  /// Upper bound r̄/(1-γ) on |V| for any solver-produced value function.
  double value_bound() const { return reward_bound / (1.0 - discount); }
};

struct Tabular {
  Vec values;
};

/// V(b) = a·b + c over budget coordinates b.
struct LinearInBudget {
  Vec a;
  double c = 0.0;
};

class StateValueFunction {
 public:
  StateValueFunction() : rep_(Tabular{}) {}
  StateValueFunction(Tabular t) : rep_(std::move(t)) {}  // NOLINT
  StateValueFunction(LinearInBudget l) : rep_(std::move(l)) {}  // NOLINT

  static StateValueFunction zeros(std::size_t n_states) {
    return Tabular{Vec(n_states, 0.0)};
  }

  bool is_tabular() const noexcept {
    return std::holds_alternative<Tabular>(rep_);
  }
  bool is_linear() const noexcept {
    return std::holds_alternative<LinearInBudget>(rep_);
  }
  const Tabular& tabular() const { return std::get<Tabular>(rep_); }
  const LinearInBudget& linear() const { return std::get<LinearInBudget>(rep_); }

  /// Table lookup; throws std::logic_error on a linear representation.
  double at_state(std::size_t state) const;
  /// a·b + c; throws std::logic_error on a tabular representation.
  double at_budget(std::span<const double> budgets) const;

 private:
  std::variant<Tabular, LinearInBudget> rep_;
};

struct PolicyProfile {
  std::vector<Vec> outer;  // indexed by state
  std::vector<Vec> inner;
};

/// Result of a generalized min-max solve: value and an SE action pair.
struct StagePair {
  double value = 0.0;
  Vec outer;
  Vec inner;
};

using StageObjective = std::function<double(const Vec&, const Vec&)>;
using StageConstraint = std::function<Vec(const Vec&, const Vec&)>;

/// Computes min_x max_{y : g(x,y) >= 0} f(x, y). Implementations must be
/// safe to call concurrently from several threads.
class MinMaxOracle {
 public:
  virtual ~MinMaxOracle() = default;
  virtual StagePair solve(const StageObjective& f,
                          const StageConstraint& g) const = 0;
  virtual double feas_tol() const noexcept { return kDefaultFeasTol; }
};

/// r(s,x,y) + γ Σ_{s'} P(s'|s,x,y) v(s').
double q_from_v(const StochasticGame& game, const StateValueFunction& v,
                std::size_t state, const Vec& x, const Vec& y);

StagePair bellman_backup(const StochasticGame& game,
                         const StateValueFunction& v, std::size_t state,
                         const MinMaxOracle& oracle);

/// One application of the Bellman operator to a tabular v. Per-state
/// backups run on up to `threads` workers; output order is by state.
StateValueFunction apply_operator(const StochasticGame& game,
                                  const StateValueFunction& v,
                                  const MinMaxOracle& oracle,
                                  unsigned threads = 1);

PolicyProfile greedy_policy(const StochasticGame& game,
                            const StateValueFunction& v,
                            const MinMaxOracle& oracle, unsigned threads = 1);

}  // namespace stackgame
