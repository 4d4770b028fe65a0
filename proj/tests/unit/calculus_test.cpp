#include "approxsym/calculus.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "approxsym/normalize.hpp"
#include "approxsym/numeric.hpp"
#include "approxsym/render.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

using testing::RandomExpr;
using testing::RandomExprOptions;

const Expr x = variable("x");
const Expr t = variable("t");
const Expr a = parameter("a");
const Expr u = jet("u");

TEST(Diff, Basics) {
  EXPECT_EQ(diff(pow(x, 3), x), normalize(3 * pow(x, 2)));
  EXPECT_EQ(diff(exp(a * x), x), normalize(a * exp(a * x)));
  EXPECT_EQ(diff(sin(x), x), cos(x));
  EXPECT_EQ(diff(a * x, a), x);
  EXPECT_EQ(diff(u * u, u), normalize(2 * u));
  EXPECT_EQ(diff(jet("u", {"x"}), u), number(0));
}

TEST(Diff, DawsonFollowsItsEquation) {
  Expr d = function("dawson", {x});
  EXPECT_EQ(diff(d, x), normalize(1 - 2 * x * d));
}

TEST(Diff, UnknownFunctionsUseFormalPartials) {
  Expr g = function("g", {t, x * x});
  Expr dg = diff(g, x);
  EXPECT_EQ(dg, normalize(2 * x * function("g", {t, x * x}, {0, 1})));
  EXPECT_EQ(function_partial(g, 0), function("g", {t, x * x}, {1, 0}));
}

TEST(DiffProperty, MatchesCentralDifferences) {
  RandomExprOptions opts;
  opts.functions = false;
  RandomExpr rng(21, opts);
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    Expr e = rng();
    auto env = rng.environment();
    testing::bind_jets(e, env, rng);
    Expr num = testing::jets_as_parameters(e);
    Expr d = testing::jets_as_parameters(diff(e, x));
    const long double h = 1e-5L;
    auto at = [&](long double dx) {
      auto v = env;
      v["x"] += dx;
      return numeric::evaluate<long double>(num, v);
    };
    long double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    long double exact = numeric::evaluate<long double>(d, env);
    if (!std::isfinite(fd) || !std::isfinite(exact)) continue;
    ++compared;
    ASSERT_NEAR(static_cast<double>(exact), static_cast<double>(fd), 1e-6 * (1 + std::fabs(static_cast<double>(fd))))
        << render(e);
  }
  EXPECT_GT(compared, 350);
}

TEST(DiffProperty, LinearAndLeibniz) {
  RandomExprOptions opts;
  opts.max_depth = 3;
  RandomExpr rng(22, opts);
  for (int i = 0; i < 300; ++i) {
    Expr f = rng();
    Expr g = rng();
    ASSERT_TRUE(is_zero(diff(f + 3 * g, x) - diff(f, x) - 3 * diff(g, x))) << render(f);
    ASSERT_TRUE(is_zero(diff(f * g, x) - diff(f, x) * g - f * diff(g, x))) << render(f) << " ; " << render(g);
  }
}

TEST(Substitute, SimultaneousAndNormalized) {
  Bindings b{{x, t}, {t, x}};
  EXPECT_EQ(substitute(x - t, b), normalize(t - x));
  EXPECT_EQ(substitute(x * x, {{x, a + 1}}), normalize(a * a + 2 * a + 1));
  // replace keeps the tree raw
  EXPECT_NE(replace(x * x, {{x, a + 1}}), normalize(a * a + 2 * a + 1));
}

TEST(FunctionDefinition, ReplacesApplicationsAndDerivatives) {
  FunctionDefinition def{"f", -1, {x}, normalize(exp(a * x))};
  Expr f = function("f", {t * t});
  Expr df = function("f", {t * t}, {1});
  EXPECT_EQ(substitute_function(f + df, def), normalize(exp(a * t * t) + a * exp(a * t * t)));
}

TEST(FunctionDefinition, JetFormal) {
  // U(x, u) = x*u^2
  FunctionDefinition def{"U", -1, {x, u}, normalize(x * u * u)};
  Expr app = function("U", {x, u}, {0, 1});
  EXPECT_EQ(substitute_function(app, def), normalize(2 * x * u));
}

}  // namespace
}  // namespace approxsym
