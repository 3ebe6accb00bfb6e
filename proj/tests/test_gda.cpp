#include <cmath>

#include "doctest.h"

#include "reference_oracles.hpp"
#include "stackgame/errors.hpp"
#include "stackgame/oracles.hpp"
#include "stackgame/seeding.hpp"

using namespace stackgame;

namespace {

struct Point {
  Eigen::VectorXd x;
  double s = 0.0;
};

Point project(const Point& in, const Eigen::VectorXd& p, double b) {
  Point out = in;
  project_buyer(out.x, out.s, p, b);
  return out;
}

double dist(const Point& a, const Point& b) {
  return std::sqrt((a.x - b.x).squaredNorm() + (a.s - b.s) * (a.s - b.s));
}

bool in_budget_set(const Point& z, const Eigen::VectorXd& p, double b, double tol) {
  return z.x.minCoeff() >= 0.0 && z.s >= 0.0 && z.x.dot(p) + z.s <= b + tol;
}

Point random_point(std::mt19937_64& rng, Eigen::Index m, double lo, double hi) {
  Point z;
  z.x.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) z.x[j] = uniform(rng, lo, hi);
  z.s = uniform(rng, lo, hi);
  return z;
}

}  // namespace

TEST_CASE("projection is feasible, idempotent and keeps interior points") {
  auto rng = make_stream(31, "projection");
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 5));
    Eigen::VectorXd p(m);
    for (Eigen::Index j = 0; j < m; ++j) p[j] = uniform(rng) < 0.2 ? 0.0 : uniform(rng, 0.1, 5.0);
    const double b = uniform(rng, 0.0, 10.0);
    const Point z = random_point(rng, m, -5.0, 10.0);
    const Point pz = project(z, p, b);
    CHECK(in_budget_set(pz, p, b, 1e-9));
    CHECK(dist(project(pz, p, b), pz) <= 1e-9);
    if (in_budget_set(z, p, b, 0.0)) CHECK(dist(pz, z) <= 1e-12);
  }
}

TEST_CASE("projection satisfies the obtuse-angle condition and is non-expansive") {
  auto rng = make_stream(37, "projection-vi");
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index m = 3;
    Eigen::VectorXd p(m);
    for (Eigen::Index j = 0; j < m; ++j) p[j] = uniform(rng, 0.2, 3.0);
    const double b = uniform(rng, 0.5, 8.0);
    const Point z = random_point(rng, m, -3.0, 8.0);
    const Point w = random_point(rng, m, -3.0, 8.0);
    const Point pz = project(z, p, b);
    const Point pw = project(w, p, b);
    CHECK(dist(pz, pw) <= dist(z, w) + 1e-12);
    // <z − Pz, y − Pz> <= 0 for feasible y (take y = Pw).
    const double inner = (z.x - pz.x).dot(pw.x - pz.x) + (z.s - pz.s) * (pw.s - pz.s);
    CHECK(inner <= 1e-9);
  }
}

TEST_CASE("projection edge cases") {
  SUBCASE("zero budget maps everything to the origin") {
    const Point pz = project({Eigen::Vector2d(3.0, -1.0), 2.0}, Eigen::Vector2d(1.0, 1.0), 0.0);
    CHECK(pz.x.norm() == doctest::Approx(0.0));
    CHECK(pz.s == doctest::Approx(0.0));
  }
  SUBCASE("zero price leaves that coordinate free above zero") {
    const Point pz = project({Eigen::Vector2d(7.0, 7.0), 7.0}, Eigen::Vector2d(0.0, 1.0), 1.0);
    CHECK(pz.x[0] == doctest::Approx(7.0));
    CHECK(pz.x[1] + pz.s == doctest::Approx(1.0));
  }
  SUBCASE("matrix form projects each buyer") {
    Eigen::MatrixXd X{{2.0, 2.0}, {0.1, 0.1}};
    Eigen::VectorXd s(2);
    s << 1.0, 0.1;
    project_budget_set(X, s, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(1.0, 5.0));
    CHECK(X.row(0).sum() + s[0] == doctest::Approx(1.0));
    CHECK(X(1, 0) == doctest::Approx(0.1));
    CHECK_THROWS_AS(project_budget_set(X, s, Eigen::Vector3d::Ones(), Eigen::Vector2d::Ones()),
                    std::invalid_argument);
  }
}

// ---------------------------------------------------------------------------

namespace {

FisherMarket one_by_one(double gamma) {
  FisherMarket m;
  m.utilities = {UtilitySpec::make(UtilityClass::Linear, Eigen::VectorXd::Constant(1, 1.0))};
  m.supply = Eigen::VectorXd::Ones(1);
  m.discount = gamma;
  m.initial_budgets = Eigen::VectorXd::Constant(1, 1.0);
  return m;
}

}  // namespace

TEST_CASE("1x1 market with zero continuation reaches p = b, x = 1, s = 0") {
  for (double b : {0.5, 1.0, 2.0}) {
    CAPTURE(b);
    const auto m = one_by_one(0.9);
    const StagePoint pt = nested_gda_fisher(m, MarketState{Eigen::VectorXd::Constant(1, b)},
                                            LinearInBudget{{0.0}, 0.0}, GdaConfig{});
    CHECK(pt.action.prices[0] == doctest::Approx(b).epsilon(1e-2));
    CHECK(pt.action.alloc(0, 0) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(pt.action.savings[0] == doctest::Approx(0.0).epsilon(1e-2));
    CHECK(pt.excess_demand_norm < 1e-2);
  }
}

TEST_CASE("static 2x2 linear market matches the Eisenberg-Gale oracle") {
  Eigen::Matrix2d theta{{12.0, 40.0}, {35.0, 18.0}};
  const Eigen::Vector2d b(10.0, 6.0);
  FisherMarket m;
  for (int i = 0; i < 2; ++i) {
    m.utilities.push_back(UtilitySpec::make(UtilityClass::Linear, theta.row(i).transpose()));
  }
  m.supply = Eigen::Vector2d::Ones();
  m.discount = 0.0;
  m.initial_budgets = b;
  GdaConfig cfg;
  // Price error decays like exp(-η_p t / p); 10^4 steps leave it near 1e-6.
  cfg.outer_iters = 10000;
  // The 1% excess-demand break would stop about 1% short in price.
  cfg.excess_demand_break = 0.0;
  const StagePoint pt = nested_gda_fisher(m, MarketState{b}, LinearInBudget{{0.0, 0.0}, 0.0}, cfg);
  const Eigen::Vector2d p_ref = ref::eg_prices_2x2(theta, b);
  CAPTURE(pt.action.prices.transpose());
  CAPTURE(p_ref.transpose());
  CHECK((pt.action.prices - p_ref).cwiseAbs().maxCoeff() <= 2e-2);
  const auto r = recce_residuals(m, LinearInBudget{{0.0, 0.0}, 0.0}, MarketState{b}, pt.action);
  CHECK(r.bpb_spread <= 1e-2);
  CHECK(r.excess_demand <= 1e-2);
  CHECK(r.clearing_value <= 1e-2 * pt.action.prices.maxCoeff());
  CHECK(pt.action.savings.norm() <= 1e-6);
}

TEST_CASE("EG oracle reproduces a hand-solved market") {
  // θ1 = (1, 3), θ2 = (2, 1), b = (4, 4): buyers specialize, p = (4, 4).
  const Eigen::Vector2d p = ref::eg_prices_2x2(Eigen::Matrix2d{{1.0, 3.0}, {2.0, 1.0}},
                                               Eigen::Vector2d(4.0, 4.0));
  CHECK(p[0] == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(p[1] == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("nested GDA is deterministic and honours warm starts") {
  const auto m = one_by_one(0.9);
  const MarketState s{Eigen::VectorXd::Constant(1, 2.0)};
  const LinearInBudget v{{0.5}, 1.0};
  const StagePoint a = nested_gda_fisher(m, s, v, GdaConfig{});
  const StagePoint b = nested_gda_fisher(m, s, v, GdaConfig{});
  CHECK(a.value == b.value);
  CHECK(a.action.prices == b.action.prices);
  const StagePoint warm = nested_gda_fisher(m, s, v, GdaConfig{}, &a.action);
  CHECK(warm.outer_iterations <= a.outer_iterations);
  StageAction bad = a.action;
  bad.prices = Eigen::Vector2d::Ones();
  CHECK_THROWS_AS(nested_gda_fisher(m, s, v, GdaConfig{}, &bad), std::invalid_argument);
}

TEST_CASE("nested GDA input validation") {
  const auto m = one_by_one(0.9);
  const MarketState s{Eigen::VectorXd::Constant(1, 1.0)};
  CHECK_THROWS_AS(nested_gda_fisher(m, s, StateValueFunction::zeros(1), GdaConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(nested_gda_fisher(m, s, LinearInBudget{{0.0, 0.0}, 0.0}, GdaConfig{}),
                  std::invalid_argument);
  GdaConfig cfg;
  cfg.eta_x = 0.0;
  CHECK_THROWS_AS(nested_gda_fisher(m, s, LinearInBudget{{0.0}, 0.0}, cfg), std::invalid_argument);
  cfg = {};
  cfg.inner_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("savings respond to the continuation slope") {
  const auto m = one_by_one(0.9);
  const MarketState s{Eigen::VectorXd::Constant(1, 2.0)};
  // A steep V makes saving pay.
  const StagePoint steep = nested_gda_fisher(m, s, LinearInBudget{{50.0}, 0.0}, GdaConfig{});
  CHECK(steep.action.savings[0] > 1.0);
  const StagePoint flat = nested_gda_fisher(m, s, LinearInBudget{{0.0}, 0.0}, GdaConfig{});
  CHECK(flat.action.savings[0] < 1e-6);
}

TEST_CASE("budget-derivative savings gradient drops the rate factor") {
  auto m = one_by_one(0.9);
  m.dynamics.rates = {{2.0, 1.0}};
  const MarketState s{Eigen::VectorXd::Constant(1, 2.0)};
  // At clearing the marginal value of spending is 1: γ a = 0.9 is below it,
  // γ E[ρ] a = 1.8 above it.
  const LinearInBudget v{{1.0}, 0.0};
  GdaConfig cfg;
  cfg.outer_iters = 200;
  const StagePoint chain = nested_gda_fisher(m, s, v, cfg);
  cfg.savings_gradient = SavingsGradient::BudgetDerivative;
  const StagePoint printed = nested_gda_fisher(m, s, v, cfg);
  CHECK(chain.action.savings[0] > printed.action.savings[0] + 0.1);
}

TEST_CASE("GDA presets carry the reference learning rates") {
  CHECK(gda_preset(UtilityClass::Linear, false).eta_x == 1.4);
  CHECK(gda_preset(UtilityClass::Linear, false).eta_p == 1.5e-2);
  CHECK(gda_preset(UtilityClass::Leontief, false).eta_p == 6.5e-4);
  CHECK(gda_preset(UtilityClass::CobbDouglas, false).eta_p == 5e-3);
  CHECK(gda_preset(UtilityClass::Linear, true).eta_x == 1.7);
  CHECK(gda_preset(UtilityClass::Leontief, true).eta_p == 5e-5);
  CHECK(gda_preset(UtilityClass::CobbDouglas, true).eta_x == 1.8);
  const GdaConfig d = gda_preset(UtilityClass::Linear, false);
  CHECK(d.outer_iters == 60);
  CHECK(d.inner_iters == 100);
  CHECK(d.excess_demand_break == 0.01);
}
