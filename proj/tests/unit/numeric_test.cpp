#include "approxsym/numeric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "approxsym/normalize.hpp"
#include "approxsym/render.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

using testing::RandomExpr;
using testing::RandomExprOptions;
using numeric::DawsonVariant;

const Expr t = variable("t");
const Expr x = variable("x");

// composite Simpson in long double; the oracle for both Dawson variants
template <typename F>
long double simpson(F f, long double a, long double b, int n) {
  long double h = (b - a) / n;
  long double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * f(a + i * h);
  return acc * h / 3;
}

TEST(Dawson, MatchesQuadrature) {
  for (long double y : {0.05L, 0.5L, 0.9241L, 1.5L, 3.0L, 5.9L, 6.0L, 6.5L, 9.0L, 14.0L}) {
    long double q = std::exp(-y * y) * simpson([](long double z) { return std::exp(z * z); }, 0.0L, y, 400000);
    long double d = numeric::dawson<long double>(y);
    EXPECT_NEAR(static_cast<double>(d / q), 1.0, 1e-10) << static_cast<double>(y);
  }
  // maximum near y = 0.9241 with value 0.5410
  EXPECT_NEAR(numeric::dawson(0.92413887), 0.54104422, 1e-8);
}

TEST(Dawson, OddAndSatisfiesItsEquation) {
  const long double h = 1e-4L;
  for (long double y : {0.1L, 0.7L, 2.0L, 5.99L, 6.01L, 10.0L}) {
    EXPECT_EQ(numeric::dawson(-y), -numeric::dawson(y));
    long double d1 = (numeric::dawson(y + h) - numeric::dawson(y - h)) / (2 * h);
    EXPECT_NEAR(static_cast<double>(d1), static_cast<double>(1 - 2 * y * numeric::dawson(y)), 1e-7);
  }
  EXPECT_EQ(numeric::dawson(0.0), 0.0);
}

TEST(Dawson, PrintedVariantIsTheOtherIntegral) {
  for (long double y : {0.3L, 1.0L, 2.5L}) {
    long double q = std::exp(-y * y) * simpson([](long double z) { return std::exp(-z * z); }, 0.0L, y, 20000);
    EXPECT_NEAR(static_cast<double>(numeric::dawson_printed(y)), static_cast<double>(q), 1e-12);
  }
  // they differ away from the origin
  EXPECT_GT(std::fabs(numeric::dawson(1.0) - numeric::dawson_printed(1.0)), 0.1);
}

TEST(Evaluate, UnboundAndJets) {
  EXPECT_THROW(numeric::evaluate<double>(t, {}), numeric::EvalError);
  EXPECT_THROW(numeric::evaluate<double>(jet("u"), {}), numeric::EvalError);
  EXPECT_DOUBLE_EQ(numeric::evaluate<double>(normalize(t * x + 1), {{"t", 2}, {"x", 3}}), 7);
}

TEST(ProgramProperty, AgreesWithTheTreeWalk) {
  RandomExprOptions opts;
  opts.functions = false;
  RandomExpr rng(61, opts);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    Expr e = rng();
    auto env = rng.environment();
    testing::bind_jets(e, env, rng);
    Expr n = testing::jets_as_parameters(normalize(e));
    std::vector<std::string> names;
    std::vector<long double> values;
    for (const auto& [k, v] : env) {
      names.push_back(k);
      values.push_back(v);
    }
    long double walk = 0;
    try {
      walk = numeric::evaluate<long double>(n, env);
    } catch (const numeric::EvalError&) {
      continue;
    }
    if (!std::isfinite(walk)) continue;
    ++compared;
    long double run = numeric::Program::compile(n, names).run(values.data());
    ASSERT_NEAR(static_cast<double>(run), static_cast<double>(walk), 1e-12 * (1 + std::fabs(static_cast<double>(walk))))
        << render(n);
  }
  EXPECT_GT(compared, 900);
}

TEST(Program, SharedSubtreesAreComputedOnce) {
  Expr s = normalize(exp(sin(t * x) + 1));
  auto p1 = numeric::Program::compile(s, {"t", "x"});
  // raw tree: normalizing would merge s*s into one exponential
  auto p2 = numeric::Program::compile(s * s + s, {"t", "x"});
  EXPECT_LE(p2.size(), p1.size() + 2);
}

TEST(CentralWeights, KnownStencils) {
  auto expect = [](int d, int m, std::vector<long double> w) {
    auto got = numeric::central_weights(d, m);
    ASSERT_EQ(got.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(static_cast<double>(got[i]), static_cast<double>(w[i]), 1e-15);
  };
  expect(1, 1, {-0.5L, 0, 0.5L});
  expect(2, 1, {1, -2, 1});
  expect(1, 2, {1.0L / 12, -2.0L / 3, 0, 2.0L / 3, -1.0L / 12});
  expect(2, 2, {-1.0L / 12, 4.0L / 3, -5.0L / 2, 4.0L / 3, -1.0L / 12});
}

TEST(EpsCoefficient, RecoversPolynomialCoefficients) {
  auto at = [](double e) {
    Eigen::ArrayXXd a(2, 2);
    a << 1 + 2 * e + 3 * e * e, e, -e * e, 5;
    return a;
  };
  Eigen::ArrayXXd c1 = numeric::eps_coefficient(at, 1, 2);
  Eigen::ArrayXXd c2 = numeric::eps_coefficient(at, 2, 2);
  EXPECT_NEAR(c1(0, 0), 2, 1e-13);
  EXPECT_NEAR(c1(0, 1), 1, 1e-13);
  EXPECT_NEAR(c1(1, 1), 0, 1e-13);
  EXPECT_NEAR(c2(1, 0), -1, 1e-13);
  EXPECT_NEAR(c2(0, 0), 3, 1e-13);
}

numeric::GridSpec small_grid() {
  numeric::GridSpec g;
  g.t0 = 0.1;
  g.t1 = 1;
  g.x0 = 0.2;
  g.x1 = 2;
  g.nt = 13;
  g.nx = 17;
  return g;
}

TEST(FiniteDifferences, AgreeWithTheSymbolicResidual) {
  Expr eq = normalize(jet("u", {"t"}) - jet("u", {"x", "x"}) - parameter("a") * jet("u") * jet("u", {"x"}));
  std::map<std::string, Expr> sol{{"u", normalize(exp(-t) * sin(x) + number(Rational(1, 2)) * x * x * t)}};
  numeric::Env<double> params{{"a", 0.7}};
  auto grid = small_grid();
  Eigen::ArrayXXd symbolic = numeric::evaluate_grid(numeric::solution_residual(eq, sol), params, grid);
  Eigen::ArrayXXd fd = numeric::fd_residual_grid(eq, sol, params, grid);
  EXPECT_GT(symbolic.abs().maxCoeff(), 0.1);
  EXPECT_LT((symbolic - fd).abs().maxCoeff(), 1e-9);
}

TEST(Grid, SameBytesForAnyThreadCount) {
  Expr e = normalize(function("dawson", {t * x}) * exp(-t) + sqrt(x + t));
  numeric::GridSpec g;
  g.nt = 97;
  g.nx = 113;
  auto run_with = [&](const char* n) {
    setenv("APPROXSYM_THREADS", n, 1);
    return numeric::evaluate_grid(e, {}, g);
  };
  Eigen::ArrayXXd one = run_with("1");
  Eigen::ArrayXXd many = run_with("64");
  unsetenv("APPROXSYM_THREADS");
  ASSERT_EQ(one.size(), many.size());
  EXPECT_EQ(std::memcmp(one.data(), many.data(), sizeof(double) * one.size()), 0);
}

TEST(Grid, ReportsTheFailingPoint) {
  numeric::GridSpec g;
  g.x0 = 0;
  g.x1 = 2;
  g.nx = 3;  // hits x = 1
  try {
    numeric::evaluate_grid(normalize(1 / (x - 1)), {}, g);
    FAIL() << "expected EvalError";
  } catch (const numeric::EvalError& err) {
    EXPECT_NE(std::string(err.what()).find("x=1"), std::string::npos) << err.what();
  }
  g.nt = 1;
  EXPECT_THROW(g.validate(), numeric::EvalError);
}

TEST(Scan, SecondOrderResidualGivesOrderTwo) {
  numeric::ScanSpec s;
  s.residual = normalize(parameter("eps") * parameter("eps") * (1 + x * t));
  s.grid = small_grid();
  s.epsilon = 0.04;
  auto rows = numeric::residual_order_scan(s);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].observed_order);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(*rows[i].observed_order, 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(rows[3].epsilon, 0.005);
}

TEST(Scan, CsvFormat) {
  std::vector<numeric::ScanRow> rows{{0.03, 2.5e-4, std::nullopt}, {0.015, 6.25e-5, 2.0}};
  std::ostringstream out;
  numeric::write_scan_csv(out, rows);
  EXPECT_EQ(out.str(), "epsilon,max_residual,observed_order\n0.03,2.500000e-04,\n0.015,6.250000e-05,2.0000\n");
}

}  // namespace
}  // namespace approxsym
