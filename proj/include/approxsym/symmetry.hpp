#pragma once

// Invariance conditions restricted to the manifold of an equation and the
// selected invariant surface conditions, plus solution checks.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/jet.hpp"
#include "approxsym/model.hpp"
#include "approxsym/perturb.hpp"

namespace approxsym {

class SymmetryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- constraints ------------------------------------------------------------

/// Rewrite rule for a derivative atom of an unknown function. Atoms with at
/// least `lead`'s derivative counts are rewritten by differentiating `rhs`.
struct FunctionRule {
  std::string origin;
  Expr lead;                  // e.g. D(f(t),t,t)
  Expr rhs;                   // in terms of `formals`
  std::vector<Expr> formals;  // the function's declared argument variables
};

struct ConstraintSet {
  Bindings parameters;  // parameter -> value
  std::vector<FunctionRule> functions;
  std::vector<std::string> applied;
  std::vector<std::string> notes;
};

/// Resolves the named constraints. `fixed` binds parameters to values first;
/// a relation whose target is already fixed is checked instead of applied,
/// and a violated one is skipped with a note.
ConstraintSet resolve_constraints(const ModelSpec& model, const std::vector<std::string>& names,
                                  const Bindings& fixed = {});

/// Parameter substitution followed by function-rule rewriting.
Expr apply_constraints(const Expr& e, const ConstraintSet& c);

/// Function-rule rewriting only; rules are applied until no atom matches.
Expr apply_function_rules(const Expr& e, const std::vector<FunctionRule>& rules);

/// A closed form checked against one function constraint of its given list.
struct DefinitionCheck {
  std::string constraint;
  Expr residual;  // cleared numerator
};

/// Substitutes the definition into each function constraint it names; the
/// parameter relations it names are applied first.
std::vector<DefinitionCheck> check_definition(const ModelSpec& model, const DefinitionSpec& def,
                                              const Bindings& fixed = {});

// ---- problems ---------------------------------------------------------------

/// A model with one generator, constraints applied, ready for the manifold.
struct Problem {
  std::string model_name;
  std::string generator_name;
  std::vector<std::string> independents;
  std::vector<std::string> dependents;
  std::vector<Expr> equations;
  int r = 0;  // differential order
  bool approximate = false;
  PerturbationContext ctx;  // approximate case only
  Generator exact;
  ApproxGenerator approx;
  ConstraintSet constraints;
};

struct ProblemOptions {
  std::vector<std::string> extra_constraints;
  Bindings fixed;                    // --set values
  std::vector<std::string> use;      // definitions substituted into everything
  std::optional<int> order;          // overrides the model's p
};

Problem make_problem(const ModelSpec& model, const GeneratorSpec& gen, const ProblemOptions& opts = {});

/// Problem without a generator, for solution checks.
Problem make_solution_problem(const ModelSpec& model, const SolutionSpec& sol,
                              const ProblemOptions& opts = {});

// ---- manifold ----------------------------------------------------------------

struct Rule {
  Expr lead;  // jet coordinate
  Expr rhs;
  std::string origin;
  int eps_order = -1;  // approximate case: which eps^k component produced it
};

struct Manifold {
  std::vector<Rule> rules;
  int normalization = -1;  // index of the xi set to 1 (or -1 when q = 0)
  int q = 0;
  std::vector<std::string> selection;

  const Rule* rule_for(const Expr& lead) const;
};

struct ManifoldOptions {
  int q = 0;
  std::vector<std::string> selection;  // defaults to the first q dependents
  std::optional<int> normalization;    // index into the independents
  int max_rounds = 64;
};

Manifold build_manifold(const Problem& problem, const ManifoldOptions& opts);

/// Number of q-element selections among m dependents.
long count_selections(int m, int q);

/// Rewrites leading coordinates until none remains.
Expr reduce_modulo(const Expr& e, const Manifold& m);

// ---- invariance ---------------------------------------------------------------

struct OrderResidual {
  int order = 0;  // eps power; 0 in the exact case
  Expr residual;  // cleared numerator, 0 when the condition holds
};

/// Prolonged generator applied to every equation, reduced modulo the
/// manifold, function rules applied, split by eps order, and cleared of
/// denominators. One list per equation is flattened in order.
std::vector<OrderResidual> invariance_residual(const Problem& problem, const Manifold& m);

bool all_zero(const std::vector<OrderResidual>& residuals);

// ---- determining systems -------------------------------------------------------

struct DeterminingEquation {
  int order = 0;
  Expr monomial;     // product of jet coordinates, 1 for the free term
  Expr coefficient;  // as split from the residual
  Expr equation;     // primitive form of the coefficient
};

struct DeterminingSystem {
  std::vector<DeterminingEquation> equations;
  std::vector<OrderResidual> residuals;  // what was split
  int normalization = -1;
};

DeterminingSystem determining_system(const Problem& problem, const Manifold& m);

/// Drops rational content, common powers of parameters and variables and a
/// shared exponential, and makes the first term positive.
Expr make_primitive(const Expr& e);

/// True if sum monomial*coefficient reproduces every residual.
bool resums(const DeterminingSystem& system);

// ---- solutions -------------------------------------------------------------------

/// Substitutes the closed forms into the equations and returns the cleared
/// residual per eps order (one entry in the exact case).
std::vector<OrderResidual> verify_solution(const Problem& problem,
                                           const std::map<std::string, Expr>& values);

/// First-order ansatz oracle: the residual is collected by the kernels that
/// depend on the independent variables and the linear conditions on the
/// unknown constants are solved by fraction-free elimination.
struct AnsatzResult {
  bool consistent = false;
  Bindings values;                 // pivot unknown -> solution
  std::vector<std::string> free;   // unknowns left arbitrary
  std::vector<Expr> conditions;    // the linear conditions that were solved
  std::vector<OrderResidual> residual_after;
};

AnsatzResult solve_ansatz(const Problem& problem, const SolutionSpec& ansatz);

}  // namespace approxsym
