#pragma once

// Jet coordinates, total derivatives and prolongation of point generators.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/expr.hpp"

namespace approxsym {

/// Derivative counts per independent variable, in declaration order.
using MultiIndex = std::vector<int>;

int total_order(const MultiIndex& s);

/// All multi-indices with 1 <= |s| <= r, ordered by |s| then lexicographically.
std::vector<MultiIndex> multi_indices(std::size_t n, int r);

struct JetCoordinate {
  std::string dependent;
  MultiIndex counts;
  int expansion = -1;  // u_(k) for k >= 0

  Expr to_expr(const std::vector<std::string>& independents) const;
};

/// Inverse of JetCoordinate::to_expr.
JetCoordinate coordinate_of(const Expr& jet, const std::vector<std::string>& independents);

/// D/Dx: partial in `var` plus the chain rule through every jet coordinate
/// (including expansion coefficients) and unknown function argument.
Expr total_derivative(const Expr& e, const std::string& var);

/// Point generator sum xi_i d/dx_i + sum eta_a d/du_a.
struct Generator {
  std::vector<std::string> independents;
  std::vector<std::string> dependents;
  std::vector<Expr> xi;   // per independent
  std::vector<Expr> eta;  // per dependent
};

/// Prolonged coefficients keyed by jet coordinate.
using Prolongation = std::map<Expr, Expr, ExprLess>;

/// eta^(s) for 1 <= |s| <= r and every dependent variable.
Prolongation prolong(const Generator& g, int r);

/// Shared recursion eta^(s+e_i) = D_i eta^(s) - sum_j D_i(xi_j) U(s+e_j).
/// `coordinate` gives U(s) for the dependent in question and `post` is
/// applied to every computed coefficient (truncation in the approximate case).
std::map<MultiIndex, Expr> prolong_component(
    const std::vector<std::string>& independents, const std::vector<Expr>& xi, const Expr& eta,
    int r, const std::function<Expr(const MultiIndex&)>& coordinate,
    const std::function<Expr(const Expr&)>& post);

/// Action of a prolonged generator: xi_i d/dx_i + eta d/du + eta^(s) d/du_s.
Expr apply_generator(const Generator& g, const Prolongation& prolonged, const Expr& e);

}  // namespace approxsym
