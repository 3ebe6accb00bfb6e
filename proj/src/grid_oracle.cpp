#include <limits>
#include <stdexcept>

#include "stackgame/errors.hpp"
#include "stackgame/oracles.hpp"

namespace stackgame {

void GridOracleConfig::validate() const {
  for (const auto* res : {&outer_resolution, &inner_resolution}) {
    if (res->empty()) throw std::invalid_argument("grid resolution list is empty");
    for (std::size_t r : *res) {
      if (r < 2) throw std::invalid_argument("grid resolution must be >= 2");
    }
  }
  if (!(feas_tol >= 0.0)) throw std::invalid_argument("feas_tol must be >= 0");
}

bool is_feasible(const Vec& constraint_values, double feas_tol) {
  for (double gk : constraint_values) {
    if (!(gk >= -feas_tol)) return false;
  }
  return true;
}

StagePair grid_minmax(const StageObjective& f, const StageConstraint& g,
                      const std::vector<Vec>& x_grid,
                      const std::vector<Vec>& y_grid, double feas_tol) {
  if (x_grid.empty() || y_grid.empty()) {
    throw std::invalid_argument("grid_minmax needs nonempty grids");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double best_value = kInf;
  std::size_t best_x = x_grid.size();
  std::size_t best_y = 0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    double inner_value = -kInf;
    std::size_t inner_arg = y_grid.size();
    for (std::size_t j = 0; j < y_grid.size(); ++j) {
      if (!is_feasible(g(x_grid[i], y_grid[j]), feas_tol)) continue;
      const double value = f(x_grid[i], y_grid[j]);
      if (inner_arg == y_grid.size() || value > inner_value) {
        inner_value = value;
        inner_arg = j;
      }
    }
    if (inner_arg == y_grid.size()) continue;  // no feasible response: +inf
    if (best_x == x_grid.size() || inner_value < best_value) {
      best_value = inner_value;
      best_x = i;
      best_y = inner_arg;
    }
  }
  if (best_x == x_grid.size()) throw InfeasibleState();
  return StagePair{best_value, x_grid[best_x], y_grid[best_y]};
}

GridOracle::GridOracle(std::vector<Vec> x_grid, std::vector<Vec> y_grid,
                       double feas_tol)
    : x_grid_(std::move(x_grid)), y_grid_(std::move(y_grid)), feas_tol_(feas_tol) {
  if (x_grid_.empty() || y_grid_.empty()) {
    throw std::invalid_argument("grid oracle needs nonempty grids");
  }
}

GridOracle GridOracle::for_game(const StochasticGame& game,
                                const GridOracleConfig& cfg) {
  cfg.validate();
  auto expand = [](const std::vector<std::size_t>& res, std::size_t dim) {
    return res.size() == 1 ? std::vector<std::size_t>(dim, res.front()) : res;
  };
  const auto xr = expand(cfg.outer_resolution, game.outer_space.dimension());
  const auto yr = expand(cfg.inner_resolution, game.inner_space.dimension());
  return GridOracle(game.outer_space.discretize(xr),
                    game.inner_space.discretize(yr), cfg.feas_tol);
}

StagePair GridOracle::solve(const StageObjective& f,
                            const StageConstraint& g) const {
  return grid_minmax(f, g, x_grid_, y_grid_, feas_tol_);
}

}  // namespace stackgame
