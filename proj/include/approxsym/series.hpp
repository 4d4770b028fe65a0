#pragma once

// Power series in a small parameter and polynomial splitting.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

class NonPolynomialError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients c_0..c_p of e = sum eps^k c_k + O(eps^(p+1)).
/// Throws NonPolynomialError if eps occurs other than as a non-negative
/// integer power of itself.
std::vector<Expr> series_coefficients(const Expr& e, const Expr& eps, int p);

/// Drops every term of eps-degree above p.
Expr truncate_series(const Expr& e, const Expr& eps, int p);

/// Sum of eps^k * coefficients[k].
Expr series_sum(const std::vector<Expr>& coefficients, const Expr& eps);

/// Highest eps-degree present in e, or -1 for zero.
int series_degree(const Expr& e, const Expr& eps);

struct MonomialTerm {
  Expr monomial;     // product of powers of the split variables, 1 for the constant part
  Expr coefficient;  // free of the split variables
};

/// Splits e = sum monomial * coefficient over the given kernels. Each kernel
/// must occur only to non-negative integer powers and nowhere else.
std::vector<MonomialTerm> collect_by_monomials(const Expr& e, const std::vector<Expr>& vars);

/// Solution of e = 0 for `var` when e is affine in it with a non-zero
/// coefficient; nullopt otherwise.
std::optional<Expr> solve_linear(const Expr& e, const Expr& var);

}  // namespace approxsym
