#include <algorithm>
#include <stdexcept>
#include <vector>

#include "stackgame/oracles.hpp"

namespace stackgame {

// Projection of z onto {z >= 0, w·z <= b} with w >= 0. When clipping at zero
// is not enough, the KKT point is z(λ) = max(0, z − λw) with w·z(λ) = b;
// h(λ) = w·z(λ) is piecewise linear and decreasing, so λ is found exactly by
// walking the sorted breakpoints z_k / w_k.
void project_buyer(Eigen::Ref<Eigen::VectorXd> alloc, double& saving,
                   const Eigen::VectorXd& prices, double budget) {
  const Eigen::Index m = alloc.size();
  if (prices.size() != m) {
    throw std::invalid_argument("price and allocation dimensions differ");
  }
  budget = std::max(budget, 0.0);
  auto weight = [&](Eigen::Index k) { return k < m ? prices[k] : 1.0; };
  auto coord = [&](Eigen::Index k) -> double& { return k < m ? alloc[k] : saving; };

  double spend = 0.0;
  for (Eigen::Index k = 0; k <= m; ++k) {
    if (weight(k) < 0.0) throw std::invalid_argument("negative price");
    coord(k) = std::max(coord(k), 0.0);
    spend += weight(k) * coord(k);
  }
  if (spend <= budget) return;

  struct Breakpoint {
    double t;
    Eigen::Index k;
  };
  std::vector<Breakpoint> bps;
  bps.reserve(static_cast<std::size_t>(m) + 1);
  for (Eigen::Index k = 0; k <= m; ++k) {
    if (weight(k) > 0.0 && coord(k) > 0.0) bps.push_back({coord(k) / weight(k), k});
  }
  std::sort(bps.begin(), bps.end(), [](const Breakpoint& a, const Breakpoint& b) {
    return a.t > b.t || (a.t == b.t && a.k < b.k);
  });

  double s1 = 0.0;  // Σ_active w_k z_k
  double s2 = 0.0;  // Σ_active w_k²
  double lambda = 0.0;
  for (std::size_t r = 0; r < bps.size(); ++r) {
    const double w = weight(bps[r].k);
    s1 += w * coord(bps[r].k);
    s2 += w * w;
    lambda = (s1 - budget) / s2;
    const double next = r + 1 < bps.size() ? bps[r + 1].t : 0.0;
    if (lambda >= next) break;
  }
  for (Eigen::Index k = 0; k <= m; ++k) {
    coord(k) = std::max(0.0, coord(k) - lambda * weight(k));
  }
}

void project_budget_set(Eigen::MatrixXd& alloc, Eigen::VectorXd& savings,
                        const Eigen::VectorXd& prices,
                        const Eigen::VectorXd& budgets) {
  if (alloc.rows() != savings.size() || alloc.rows() != budgets.size()) {
    throw std::invalid_argument("buyer dimensions differ");
  }
  for (Eigen::Index i = 0; i < alloc.rows(); ++i) {
    Eigen::VectorXd row = alloc.row(i).transpose();
    project_buyer(row, savings[i], prices, budgets[i]);
    alloc.row(i) = row.transpose();
  }
}

}  // namespace stackgame
