#pragma once
// Test-only reference implementations. They share no code with the library
// paths they check: plain loops, closed forms and dense enumeration.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace ref {

using Vec = std::vector<double>;

struct MinMax {
  double value = std::numeric_limits<double>::infinity();
  std::size_t outer = 0;
  std::size_t inner = 0;
  bool feasible = false;
};

// min over xs of max over feasible ys, by a triple loop (x, y, constraint).
inline MinMax triple_loop_minmax(const std::function<double(const Vec&, const Vec&)>& f,
                                 const std::function<Vec(const Vec&, const Vec&)>& g,
                                 const std::vector<Vec>& xs, const std::vector<Vec>& ys,
                                 double tol) {
  MinMax best;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double inner_best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    bool any = false;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const Vec c = g(xs[i], ys[j]);
      bool ok = true;
      for (double cv : c) ok = ok && cv >= -tol;
      if (!ok) continue;
      const double val = f(xs[i], ys[j]);
      if (!any || val > inner_best) {
        inner_best = val;
        arg = j;
        any = true;
      }
    }
    if (any && (!best.feasible || inner_best < best.value)) {
      best = {inner_best, i, arg, true};
    }
  }
  return best;
}

// Eisenberg-Gale dual for a static linear market with unit supplies:
// D(p) = Σ_j p_j + Σ_i b_i log max_j(θ_ij / p_j). Equilibrium prices
// minimize D and satisfy Σ_j p_j = Σ_i b_i, so for two goods a dense search
// along p_1 + p_2 = Σ b with a local refinement pass finds them.
inline Eigen::Vector2d eg_prices_2x2(const Eigen::Matrix2d& theta, const Eigen::Vector2d& b) {
  const double total = b.sum();
  auto dual = [&](double p1) {
    const double p2 = total - p1;
    double d = p1 + p2;
    for (int i = 0; i < 2; ++i) {
      d += b[i] * std::log(std::max(theta(i, 0) / p1, theta(i, 1) / p2));
    }
    return d;
  };
  double lo = 0.0;
  double hi = total;
  double best = total / 2.0;
  for (int pass = 0; pass < 4; ++pass) {
    const int n = 20000;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 1; k < n; ++k) {
      const double p1 = lo + (hi - lo) * k / n;
      const double d = dual(p1);
      if (d < best_d) {
        best_d = d;
        best = p1;
      }
    }
    const double width = (hi - lo) / n * 4.0;
    lo = std::max(0.0, best - width);
    hi = std::min(total, best + width);
  }
  return {best, total - best};
}

// Best Σ_t γ^t β_t (b_t − s_t) for a linear buyer with b_{t+1} = R + ρ_t s_t,
// by enumerating savings on a grid of `points` levels of [0, b_t] per step.
inline double savings_grid_dp(const Vec& beta, const Vec& rates, double b0, double replenish,
                              double gamma, int points = 101) {
  std::function<double(std::size_t, double)> go = [&](std::size_t t, double b) -> double {
    if (t == beta.size()) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    const int levels = t + 1 == beta.size() ? 1 : points;
    for (int k = 0; k < levels; ++k) {
      const double s = levels == 1 ? 0.0 : b * k / (points - 1);
      const double here = beta[t] * (b - s);
      const double later = gamma * go(t + 1, replenish + rates[t] * s);
      best = std::max(best, here + later);
    }
    return best;
  };
  return go(0, b0);
}

}  // namespace ref
