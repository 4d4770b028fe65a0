#pragma once

// Seeded random expression trees for property tests. Fractional powers are
// only applied to subtrees that are positive for positive symbol values, so
// numeric comparisons stay real.

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/expr.hpp"
#include "approxsym/model.hpp"
#include "approxsym/numeric.hpp"
#include "approxsym/parser.hpp"
#include "approxsym/render.hpp"

namespace approxsym {

// gtest prints expressions through this
inline void PrintTo(const Expr& e, std::ostream* os) { *os << render(e); }

}  // namespace approxsym

namespace approxsym::testing {

// params a b c, small eps, indep t x, dep u, func f(x) g(t,x)
inline const char* kRandomModel =
    "model rnd\n"
    "params a b c\n"
    "small eps order 2\n"
    "indep t x\n"
    "dep u\n"
    "func f(x) g(t,x)\n";

inline ModelSpec random_model() { return *parse_model(kRandomModel).model; }

struct RandomExprOptions {
  bool jets = true;
  bool functions = true;
  bool special = true;      // exp, sin, cos, sqrt, dawson
  bool expansions = false;  // u[k] instead of u
  int max_depth = 4;
};

class RandomExpr {
 public:
  explicit RandomExpr(std::uint64_t seed, RandomExprOptions opts = {}) : rng_(seed), opts_(opts) {}

  Expr operator()() { return gen(opts_.max_depth, false); }
  Expr positive() { return gen(opts_.max_depth, true); }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  /// Positive values for every plain symbol the generator can produce.
  numeric::Env<long double> environment() {
    numeric::Env<long double> env;
    for (const char* n : {"a", "b", "c", "eps", "t", "x"}) env[n] = real(0.3, 1.5);
    return env;
  }

  Expr atom(bool positive) {
    switch (uniform(0, opts_.jets ? 5 : 3)) {
      case 0: {
        int n = uniform(1, 5);
        if (!positive && uniform(0, 3) == 0) n = -n;
        return uniform(0, 2) == 0 ? number(Rational(n, uniform(1, 4))) : number(n);
      }
      case 1: return parameter(std::string(1, "abc"[uniform(0, 2)]));
      case 2: return variable(uniform(0, 1) ? "x" : "t");
      case 3: return uniform(0, 4) == 0 ? parameter("eps") : variable("x");
      default: {
        static const std::vector<std::vector<std::string>> wrts{{}, {"x"}, {"t"}, {"x", "x"}, {"t", "x"}};
        const auto& w = wrts[uniform(0, static_cast<int>(wrts.size()) - 1)];
        int k = opts_.expansions ? uniform(0, 2) : -1;
        // jets are treated as positive symbols, like every other symbol
        return jet("u", w, k);
      }
    }
  }

  Expr gen(int depth, bool positive) {
    if (depth <= 0 || uniform(0, 9) < 2) return atom(positive);
    int choice = uniform(0, 11);
    if (!opts_.special && choice >= 7 && choice <= 9) choice = 0;
    if (!opts_.functions && choice == 10) choice = 2;
    switch (choice) {
      case 0:
      case 1: {
        std::vector<Expr> terms;
        for (int i = uniform(2, 3); i > 0; --i) terms.push_back(gen(depth - 1, positive));
        return sum(std::move(terms));
      }
      case 2:
      case 3: {
        std::vector<Expr> factors;
        for (int i = uniform(2, 3); i > 0; --i) factors.push_back(gen(depth - 1, positive));
        return product(std::move(factors));
      }
      case 4:
        if (positive) return gen(depth - 1, true) / gen(depth - 1, true);
        return gen(depth - 1, false) - gen(depth - 1, false);
      case 5: return pow(gen(depth - 1, positive), uniform(1, 3));
      case 6: {
        // negative and fractional exponents only on positive bases
        static const std::vector<Rational> ex{Rational(-1), Rational(1, 2), Rational(3, 2), Rational(-1, 2),
                                              Rational(2, 3)};
        return pow(gen(depth - 1, true), ex[uniform(0, static_cast<int>(ex.size()) - 1)]);
      }
      case 7: return exp(small(depth - 1));
      case 8: return positive ? sqrt(gen(depth - 1, true)) : (uniform(0, 1) ? sin(small(depth - 1)) : cos(small(depth - 1)));
      case 9: return positive ? exp(small(depth - 1)) : function("dawson", {small(depth - 1)});
      case 10:
        if (positive) return exp(small(depth - 1));
        if (uniform(0, 1)) return function("f", {gen(depth - 1, false)});
        return function("g", {variable("t"), gen(depth - 1, false)});
      default: return gen(depth - 1, positive) * atom(positive);
    }
  }

 private:
  // arguments of exp and friends stay small so values remain moderate
  Expr small(int depth) {
    Expr inner = gen(std::min(depth, 2), false);
    return product({number(Rational(1, 4)), inner});
  }

  std::mt19937_64 rng_;
  RandomExprOptions opts_;
};

/// Jets become parameters named after their rendering, so the numeric
/// evaluators can treat them as plain symbols.
inline Expr jets_as_parameters(const Expr& e) {
  Bindings b;
  for (const Expr& j : jets_in(e)) b.emplace(j, parameter("jet:" + render(j)));
  return replace(e, b);
}

/// Binds a random positive value for every jet of `e` (as named above).
template <typename T>
void bind_jets(const Expr& e, numeric::Env<T>& env, RandomExpr& rng) {
  for (const Expr& j : jets_in(e)) {
    auto key = "jet:" + render(j);
    if (!env.count(key)) env[key] = static_cast<T>(rng.real(0.3, 1.5));
  }
}

}  // namespace approxsym::testing
