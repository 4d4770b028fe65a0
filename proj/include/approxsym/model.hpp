#pragma once

// In-memory form of a `.sym` model file.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/expr.hpp"

namespace approxsym {

struct SourceSpan {
  std::string file;
  int line = 0;    // 1-based; 0 when unknown
  int column = 0;  // 1-based
  int length = 0;
};

struct FunctionSignature {
  std::string name;
  std::vector<std::string> args;
};

enum class SymbolKind { Parameter, Small, Independent, Dependent, Function };

class SymbolTable {
 public:
  /// False if the name is already taken by any category.
  bool declare(const std::string& name, SymbolKind kind);
  bool declare_function(FunctionSignature sig);

  std::optional<SymbolKind> lookup(const std::string& name) const;
  const FunctionSignature* function(const std::string& name) const;

  const std::vector<std::string>& parameters() const { return parameters_; }
  const std::vector<std::string>& independents() const { return independents_; }
  const std::vector<std::string>& dependents() const { return dependents_; }
  const std::vector<FunctionSignature>& functions() const { return functions_; }
  const std::optional<std::string>& small() const { return small_; }

  /// The small parameter as an expression; throws if none was declared.
  Expr small_symbol() const;

 private:
  std::map<std::string, SymbolKind> kinds_;
  std::vector<std::string> parameters_;
  std::vector<std::string> independents_;
  std::vector<std::string> dependents_;
  std::vector<FunctionSignature> functions_;
  std::optional<std::string> small_;
};

struct Equation {
  std::string name;
  Expr expr;  // lhs - rhs
  SourceSpan span;
};

/// `constraint NAME: lhs = rhs [for SYM]`. Constraints mentioning unknown
/// functions become rewrite rules for their highest derivative; the others
/// are parameter relations solved for one parameter.
struct Constraint {
  std::string name;
  Expr expr;  // lhs - rhs
  std::string solve_for;
  bool on_functions = false;
  SourceSpan span;
};

/// Infinitesimals per order. An exact generator has one order. Keys are the
/// independent (xi) and dependent (eta) variable names; absent means 0.
struct GeneratorOrder {
  std::map<std::string, Expr> xi;
  std::map<std::string, Expr> eta;
};

struct GeneratorSpec {
  std::string name;
  std::vector<std::string> given;
  std::vector<GeneratorOrder> orders;
  SourceSpan span;
};

/// A closed form per dependent variable (a polynomial in the small
/// parameter for approximate models). An ansatz also lists unknown constants.
struct SolutionSpec {
  std::string name;
  std::vector<std::string> given;
  std::map<std::string, Expr> values;
  std::vector<std::string> unknowns;
  bool ansatz = false;
  SourceSpan span;
};

/// `def NAME: f(x) = body`: closed form for an unknown function.
struct DefinitionSpec {
  std::string name;
  std::vector<std::string> given;
  FunctionDefinition definition;
  SourceSpan span;
};

struct ModelSpec {
  std::string name;
  SymbolTable symbols;
  int order = 1;  // perturbation order p, used when a small parameter exists
  std::vector<Equation> equations;
  std::vector<Constraint> constraints;
  std::vector<GeneratorSpec> generators;
  std::vector<SolutionSpec> solutions;
  std::vector<DefinitionSpec> definitions;

  bool approximate() const { return symbols.small().has_value(); }

  const GeneratorSpec* find_generator(const std::string& n) const;
  const SolutionSpec* find_solution(const std::string& n) const;
  const Constraint* find_constraint(const std::string& n) const;
  const DefinitionSpec* find_definition(const std::string& n) const;

  /// Highest derivative order over all equations.
  int differential_order() const;
};

}  // namespace approxsym
