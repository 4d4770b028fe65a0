#pragma once

// Canonical form.
//
// A canonical expression is an expanded sum of terms. Each term is a rational
// coefficient times a product of kernel powers times at most one exponential:
//
//   kernels   parameters, variables, jet coordinates, function applications,
//             sin/cos of a canonical argument, irreducible sums (only under a
//             negative or fractional exponent), positive integers or -1
//             (only under a fractional exponent in (0,1))
//   exponent  any non-zero rational; sums carry exponents < 1, sin < 2
//   exp       exp(a)*exp(b) is stored as exp(a+b)
//
// Sums and products are sorted by a fixed total order, so equal polynomial
// combinations of kernels normalize to structurally identical trees.
// Radicals follow the positive-real power laws (x^a)^b = x^(ab), (xy)^a = x^a y^a.

#include <map>
#include <stdexcept>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

/// Raised for undefined operations such as 0^-1.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Factor {
  Expr base;
  Rational exponent;
};

struct Monomial {
  std::vector<Factor> factors;  // sorted by base, distinct bases
  Expr exp_arg;                 // canonical, 0 when absent
  Rational degree;              // sum of exponents, cached for ordering
};

int compare(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

/// Canonical sum of terms, monomial -> non-zero coefficient.
using Poly = std::map<Monomial, Rational, MonomialLess>;

Poly to_poly(const Expr& e);
Expr to_expr(const Poly& p);
Expr monomial_expr(const Monomial& m);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_pow(const Poly& a, const Rational& exponent);
Poly poly_scale(const Poly& a, const Rational& c);

Expr normalize(const Expr& e);

/// Numerator and denominator after clearing every sum kernel with a negative
/// exponent and every negative power of a symbol or trig kernel.
struct Fraction {
  Expr numerator;
  Expr denominator;
};
Fraction together(const Expr& e);

/// Exact zero test: the cleared numerator normalizes to 0.
bool is_zero(const Expr& e);

/// numerator/denominator of `together`, with 0 for a vanishing numerator.
Expr simplify(const Expr& e);

/// Splits a canonical expression into its terms (a Number is one term).
std::vector<Expr> terms_of(const Expr& canonical);

/// Rational coefficient and remaining monomial of a single canonical term.
std::pair<Rational, Expr> split_coefficient(const Expr& canonical_term);

}  // namespace approxsym
