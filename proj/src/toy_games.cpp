#include "stackgame/toy_games.hpp"

#include <algorithm>

namespace stackgame {

StochasticGame make_toy_game(double discount) {
  StochasticGame g;
  g.n_states = 2;
  g.discount = discount;
  g.reward_bound = 1.0;
  g.outer_space = ActionSpace::box({0.0}, {1.0});
  g.inner_space = ActionSpace::box({0.0}, {1.0});
  g.reward = [](std::size_t s, const Vec& x, const Vec& y) {
    const double a = x[0], b = y[0];
    if (s == 0) return 0.5 * (a - b) * (a - b) + 0.25 * b - 0.25 * a;
    return 0.6 * a * b - 0.3 * a + 0.2 * b;
  };
  g.constraints = [](std::size_t s, const Vec& x, const Vec& y) {
    // Follower can exceed the leader by at most a state-dependent margin.
    if (s == 0) return Vec{x[0] + 0.5 - y[0]};
    return Vec{1.25 - x[0] - y[0]};
  };
  g.transition = [](std::size_t s, const Vec& x, const Vec& y) {
    const double stay = 0.3 + 0.4 * x[0] * (1.0 - y[0]);
    return s == 0 ? Vec{stay, 1.0 - stay} : Vec{1.0 - stay, stay};
  };
  return g;
}

StochasticGame make_three_state_game(double discount) {
  StochasticGame g;
  g.n_states = 3;
  g.discount = discount;
  g.reward_bound = 1.0;
  g.outer_space = ActionSpace::box({0.0}, {1.0});
  g.inner_space = ActionSpace::box({0.0}, {1.0});
  g.reward = [](std::size_t s, const Vec& x, const Vec& y) {
    const double a = x[0], b = y[0];
    switch (s) {
      case 0: return (a - b) * (a - b) - 0.5 * a;
      case 1: return 0.8 * a * b - 0.4 * b + 0.1;
      default: return 0.5 * b * b - 0.7 * a * (1.0 - b) + 0.2;
    }
  };
  g.constraints = [](std::size_t s, const Vec& x, const Vec& y) {
    switch (s) {
      case 0: return Vec{x[0] + 0.25 - y[0]};
      case 1: return Vec{1.5 - x[0] - y[0], y[0] - 0.25 * x[0]};
      default: return Vec{1.0 - y[0]};
    }
  };
  g.transition = [](std::size_t s, const Vec& x, const Vec& y) {
    const double fwd = 0.2 + 0.4 * x[0];
    const double back = 0.1 + 0.2 * y[0];
    Vec p(3, 0.0);
    p[(s + 1) % 3] += fwd;
    p[(s + 2) % 3] += back;
    p[s] += 1.0 - fwd - back;
    return p;
  };
  return g;
}

}  // namespace stackgame
