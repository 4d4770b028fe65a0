#pragma once

// Derivations, substitution and function definitions on expression trees.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym {

/// A derivation acting on the kernels of an expression tree. Sums, products,
/// powers, exp/sin/cos and builtins follow the usual rules; application of
/// unknown functions follows the chain rule over their arguments.
struct Derivation {
  // Image of a Parameter, Variable, Jet or Function node. Returning nullopt
  // means "use the default": 0 for symbols, the chain rule for functions.
  std::function<std::optional<Expr>(const Expr&)> atom;
  // Extra term added to the chain rule for function applications (e.g. the
  // family shift of the perturbation recursion). May be empty.
  std::function<Expr(const Expr&)> function_extra;
};

/// Applies `d` to `e`; the result is normalized.
Expr derive(const Expr& e, const Derivation& d);

class UndeclaredSymbol : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Partial derivative treating every other symbol as constant. `v` is a
/// variable, parameter, jet coordinate or function application.
Expr diff(const Expr& e, const Expr& v);

/// Formal partial of a function application with respect to argument `slot`.
Expr function_partial(const Expr& application, std::size_t slot);

using Bindings = std::map<Expr, Expr, ExprLess>;

/// Simultaneous replacement of the bound nodes, then normalize.
Expr substitute(const Expr& e, const Bindings& bindings);

/// Same as `substitute` without the final normalization.
Expr replace(const Expr& e, const Bindings& bindings);

/// Closed form for an unknown function: f(p1,...,pn) = body.
struct FunctionDefinition {
  std::string name;
  int family = -1;
  std::vector<Expr> formals;  // variables or jets standing for the arguments
  Expr body;
};

/// Replaces every application of the defined function, including formal
/// derivatives, by the corresponding derivative of the body.
Expr substitute_function(const Expr& e, const FunctionDefinition& def);

}  // namespace approxsym
