#include "approxsym/jet.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>

#include "approxsym/normalize.hpp"
#include "approxsym/numeric.hpp"
#include "approxsym/render.hpp"
#include "flow_oracle.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

using testing::RandomExpr;
using testing::RandomExprOptions;

const Expr t = variable("t");
const Expr x = variable("x");
const Expr u = jet("u");
const std::vector<std::string> kTX{"t", "x"};

TEST(MultiIndex, Enumeration) {
  auto all = multi_indices(2, 2);
  ASSERT_EQ(all.size(), 5u);  // (1,0) (0,1) (2,0) (1,1) (0,2)
  EXPECT_EQ(total_order(all.front()), 1);
  EXPECT_EQ(total_order(all.back()), 2);
  EXPECT_EQ(multi_indices(3, 3).size(), 3u + 6u + 10u);
}

TEST(JetCoordinate, RoundTrip) {
  Expr j = jet("u", {"t", "x", "x"});
  JetCoordinate c = coordinate_of(j, kTX);
  EXPECT_EQ(c.counts, (MultiIndex{1, 2}));
  EXPECT_EQ(c.to_expr(kTX), j);
  Expr k = jet("u", {"x"}, 2);
  EXPECT_EQ(coordinate_of(k, kTX).expansion, 2);
  EXPECT_EQ(coordinate_of(k, kTX).to_expr(kTX), k);
}

TEST(TotalDerivative, ChainRule) {
  Expr e = u * u + t * x;
  EXPECT_EQ(total_derivative(e, "x"), normalize(2 * u * jet("u", {"x"}) + t));
  Expr g = function("g", {t, u});
  EXPECT_EQ(total_derivative(g, "x"), normalize(function("g", {t, u}, {0, 1}) * jet("u", {"x"})));
  EXPECT_EQ(total_derivative(jet("u", {"t"}, 1), "x"), jet("u", {"t", "x"}, 1));
}

TEST(TotalDerivativeProperty, Commute) {
  RandomExpr rng(41);
  for (int i = 0; i < 300; ++i) {
    Expr e = rng();
    Expr tx = total_derivative(total_derivative(e, "t"), "x");
    Expr xt = total_derivative(total_derivative(e, "x"), "t");
    ASSERT_TRUE(is_zero(tx - xt)) << render(e);
  }
}

TEST(Prolongation, ScalingOfU) {
  Generator g{kTX, {"u"}, {number(0), number(0)}, {u}};
  Prolongation p = prolong(g, 2);
  for (const auto& [j, coeff] : p) EXPECT_EQ(coeff, j) << render(j);
}

using testing::FlowOracle;
using testing::flow_cases;

TEST(ProlongationProperty, MatchesTheFlowOracle) {
  // smooth, positive and far from the singular sets of the flows
  FlowOracle oracle(normalize(exp(t / 3) * sin(x + 1) + x * x * t / 5 + 2));
  RandomExpr rng(42);
  for (const testing::FlowCase& fc : flow_cases()) {
    for (int k = 0; k < 10; ++k) {
      long double T = rng.real(0.2, 0.8);
      long double X = rng.real(0.3, 1.0);
      Expr worst;
      double rel = testing::max_relative_error(fc, oracle, T, X, 2, &worst);
      ASSERT_LT(rel, 1e-6) << fc.name << " " << render(worst) << " at t=" << static_cast<double>(T)
                           << " x=" << static_cast<double>(X);
    }
  }
}

TEST(ProlongationProperty, OracleDetectsAWrongCoefficient) {
  // the same comparison must fail for a generator whose flow is not its own
  Expr phi = normalize(exp(t / 3) * sin(x + 1) + x * x * t / 5 + 2);
  FlowOracle oracle(phi);
  Generator g{kTX, {"u"}, {number(0), number(0)}, {u * u}};
  testing::Flow wrong = [](const testing::Point& p, long double s) { return testing::Point{p[0], p[1], p[2] * std::exp(s)}; };
  Expr ux = jet("u", {"x"});
  long double expected = oracle.rate(wrong, 0.5L, 0.5L, 0, 1);
  long double got = oracle.on_phi(prolong(g, 1).at(ux), 0.5L, 0.5L);
  EXPECT_GT(std::fabs(got - expected), 1e-2);
}

TEST(ApplyGenerator, ActsAsAVectorField) {
  Generator g{kTX, {"u"}, {number(1), x}, {u}};
  Prolongation p = prolong(g, 1);
  Expr e = t * u + jet("u", {"x"});
  // xi_t d/dt + xi_x d/dx + eta d/du + eta^x d/du_x
  Expr expected = u + t * u + p.at(jet("u", {"x"}));
  EXPECT_TRUE(is_zero(apply_generator(g, p, e) - expected));
}

}  // namespace
}  // namespace approxsym
