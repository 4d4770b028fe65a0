#include "approxsym/normalize.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "approxsym/numeric.hpp"
#include "approxsym/render.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

using testing::RandomExpr;
using testing::RandomExprOptions;

const Expr u = jet("u");
const Expr x = variable("x");
const Expr a = parameter("a");

TEST(Normalize, AnnihilatorAndIdentity) {
  EXPECT_EQ(normalize(u * 0 + x), x);
  EXPECT_EQ(normalize(u * 1), u);
  EXPECT_EQ(normalize(sum({})), number(0));
  EXPECT_EQ(normalize(product({})), number(1));
}

TEST(Normalize, LikeTerms) {
  EXPECT_EQ(normalize(2 * u + u), normalize(3 * u));
  EXPECT_EQ(normalize(u * x * u), normalize(pow(u, 2) * x));
}

TEST(Normalize, BinomialCancels) {
  Expr e = pow(u + 1, 2) - pow(u, 2) - 2 * u - 1;
  EXPECT_TRUE(normalize(e).is_number(0));
}

TEST(Normalize, ExponentialsMerge) {
  EXPECT_EQ(normalize(exp(x) * exp(a)), normalize(exp(x + a)));
  EXPECT_EQ(normalize(exp(x) * exp(-x)), number(1));
  EXPECT_EQ(normalize(pow(exp(x), 2)), normalize(exp(2 * x)));
}

TEST(Normalize, RadicalsFollowPositiveLaws) {
  EXPECT_EQ(normalize(sqrt(x) * sqrt(x)), x);
  EXPECT_EQ(normalize(pow(pow(x, Rational(1, 2)), 4)), normalize(pow(x, 2)));
  EXPECT_EQ(normalize(sqrt(a * x)), normalize(sqrt(a) * sqrt(x)));
}

TEST(Normalize, ZeroToNegativePowerIsDomainError) {
  EXPECT_THROW(normalize(pow(x - x, -1)), DomainError);
}

TEST(Normalize, RationalFunctionsCancelUnderTogether) {
  Expr e = (x * x - 1) / (x - 1) - (x + 1);
  EXPECT_TRUE(is_zero(e));
  EXPECT_FALSE(is_zero(1 / (x + 1)));
  EXPECT_TRUE(is_zero(1 / pow(x + a, 2) - 1 / (x * x + 2 * a * x + a * a)));
}

// Shuffles operands and regroups sums and products at random.
Expr scramble(const Expr& e, RandomExpr& rng) {
  if (e->args.empty()) return e;
  std::vector<Expr> args;
  for (const auto& c : e->args) args.push_back(scramble(c, rng));
  if (e.kind() == Kind::Sum || e.kind() == Kind::Product) {
    std::shuffle(args.begin(), args.end(), rng.engine());
    if (args.size() >= 3 && rng.uniform(0, 1)) {
      int cut = rng.uniform(1, static_cast<int>(args.size()) - 1);
      std::vector<Expr> head(args.begin(), args.begin() + cut);
      std::vector<Expr> rest(args.begin() + cut, args.end());
      Expr inner = e.kind() == Kind::Sum ? sum(std::move(head)) : product(std::move(head));
      rest.push_back(inner);
      args = std::move(rest);
    }
    return e.kind() == Kind::Sum ? sum(std::move(args)) : product(std::move(args));
  }
  return with_args(e, std::move(args));
}

TEST(NormalizeProperty, ReassociationGivesTheSameCanonicalTree) {
  RandomExpr rng(11);
  for (int i = 0; i < 1000; ++i) {
    Expr e = rng();
    Expr n = normalize(e);
    Expr s = normalize(scramble(e, rng));
    ASSERT_EQ(n, s) << render(e) << "\n  vs " << render(s);
  }
}

TEST(NormalizeProperty, Idempotent) {
  RandomExpr rng(12);
  for (int i = 0; i < 500; ++i) {
    Expr n = normalize(rng());
    ASSERT_EQ(normalize(n), n) << render(n);
    ASSERT_EQ(normalize(with_args(n, n->args)), n) << render(n);
  }
}

TEST(NormalizeProperty, ValueIsPreserved) {
  RandomExprOptions opts;
  opts.functions = false;
  RandomExpr rng(13, opts);
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    Expr e = rng();
    auto env = rng.environment();
    testing::bind_jets(e, env, rng);
    Expr n = normalize(e);
    long double raw = numeric::evaluate<long double>(testing::jets_as_parameters(e), env);
    long double canon = numeric::evaluate<long double>(testing::jets_as_parameters(n), env);
    if (!std::isfinite(raw)) continue;
    ++compared;
    ASSERT_NEAR(static_cast<double>(canon), static_cast<double>(raw), 1e-9 * (1 + std::fabs(static_cast<double>(raw))))
        << render(e) << "\n  normalized " << render(n);
  }
  EXPECT_GT(compared, 900);
}

}  // namespace
}  // namespace approxsym
