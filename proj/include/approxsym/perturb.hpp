#pragma once

// Regular perturbation in a small parameter: expansion of the dependent
// variables, the recursion operator R and approximate generators.

#include <stdexcept>
#include <string>
#include <vector>

#include "approxsym/expr.hpp"
#include "approxsym/jet.hpp"

namespace approxsym {

class PerturbationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// u = u[0] + eps*u[1] + ... + eps^p*u[p] for every dependent variable.
struct PerturbationContext {
  Expr eps;
  int order = 1;
  std::vector<std::string> independents;
  std::vector<std::string> dependents;

  /// Expansion coefficient u_(k) of `dependent`, differentiated per `counts`.
  Expr coefficient(const std::string& dependent, int k, const MultiIndex& counts = {}) const;
  /// sum_k eps^k u_(k),s
  Expr series(const std::string& dependent, const MultiIndex& counts = {}) const;
};

/// Replaces u and its jets by their expansions and drops O(eps^(p+1)).
/// Non-polynomial kernels of u are Taylor expanded.
Expr expand_dependent(const PerturbationContext& ctx, const Expr& e);

/// Coefficients of eps^0..eps^p of expand_dependent(ctx, e).
std::vector<Expr> expand_orders(const PerturbationContext& ctx, const Expr& e);

/// The recursion operator: R[u_(k)] = (k+1) u_(k+1) on coefficients and their
/// jets, R[F_(k)] = F_(k+1) + sum_j F_(k),j R[arg_j] on function families,
/// extended as a derivation. Throws PerturbationError for unexpanded
/// dependent variables or function arguments other than x and u_(0).
Expr recursion_R(const PerturbationContext& ctx, const Expr& e);

/// Approximate generator: seeds xi_(k), eta_(k) in (x, u_(0)) and the
/// derived components xi~_(k), eta~_(k) (xi~_(0) = xi_(0)).
struct ApproxGenerator {
  PerturbationContext ctx;
  std::vector<std::vector<Expr>> xi_seed;   // [k][i]
  std::vector<std::vector<Expr>> eta_seed;  // [k][a]
  std::vector<std::vector<Expr>> xi;        // [k][i], tilded
  std::vector<std::vector<Expr>> eta;       // [k][a], tilded

  /// sum_k eps^k xi~_(k)i and likewise for eta.
  Expr xi_series(std::size_t i) const;
  Expr eta_series(std::size_t a) const;
  /// The generator with eps-series infinitesimals acting on the original u.
  Generator as_series_generator() const;
  /// Drops every order above `p`.
  ApproxGenerator truncated(int p) const;
};

/// Missing seed orders are zero. Seeds may only depend on x and u[0].
ApproxGenerator build_approx_generator(const PerturbationContext& ctx,
                                       std::vector<std::vector<Expr>> xi_seed,
                                       std::vector<std::vector<Expr>> eta_seed);

/// Prolonged coefficients keyed by jets of the original u; values are
/// polynomials in eps of degree <= p over jets of u_(0..p).
Prolongation prolong_approx(const ApproxGenerator& g, int r);

}  // namespace approxsym
