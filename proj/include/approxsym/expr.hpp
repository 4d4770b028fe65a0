#pragma once

// Immutable symbolic expression trees.
//
// Builders and operators in this header construct raw trees exactly as written;
// `normalize` (see normalize.hpp) turns any tree into its canonical form.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "approxsym/rational.hpp"

namespace approxsym {

enum class Kind : std::uint8_t {
  Number,
  Parameter,
  Variable,
  Jet,
  Function,
  Sin,
  Cos,
  Exp,
  Power,
  Product,
  Sum,
};

const char* kind_name(Kind k);

struct Node;

class Expr {
 public:
  Expr();  // the number 0
  Expr(int value);                // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);    // NOLINT(google-explicit-constructor)
  explicit Expr(std::shared_ptr<const Node> node);

  const Node& node() const { return *node_; }
  const Node* operator->() const { return node_.get(); }
  Kind kind() const;
  std::size_t hash() const;

  bool is_number() const { return kind() == Kind::Number; }
  bool is_number(long value) const;
  bool is_symbol() const;  // Parameter, Variable, Jet or Function
  const Rational& number() const;

  bool same_node(const Expr& other) const { return node_ == other.node_; }

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Kind kind = Kind::Number;
  // Set on nodes produced by the normalizer; the normalizer trusts it.
  bool canonical = false;
  Rational value;                // Number value or Power exponent
  std::string name;              // symbol, jet dependent or function name
  int index = -1;                // expansion order (Jet) or family index (Function)
  std::vector<std::string> wrt;  // Jet: derivative variables, sorted
  std::vector<int> partials;     // Function: derivative count per argument
  std::vector<Expr> args;        // operands
  std::size_t hash = 0;
};

// Total structural order: (kind, name, index, payload, children).
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// ---- raw builders -------------------------------------------------------

Expr number(const Rational& value);
Expr parameter(std::string name);
Expr variable(std::string name);

/// Jet coordinate of dependent `dep`, differentiated once per entry of `wrt`.
/// `order` >= 0 selects the expansion coefficient u_(order); -1 is u itself.
Expr jet(std::string dep, std::vector<std::string> wrt = {}, int order = -1);

/// Application of an unknown or builtin function. `partials[i]` counts the
/// derivatives taken with respect to argument i; `family` >= 0 marks f_(k).
Expr function(std::string name, std::vector<Expr> args, std::vector<int> partials = {},
              int family = -1);

Expr exp(Expr arg);
Expr sin(Expr arg);
Expr cos(Expr arg);
Expr sqrt(Expr arg);
Expr pow(Expr base, const Rational& exponent);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Builds a node marked canonical. For use by the normalizer only.
Expr make_canonical(Node node);

/// Copy of `e` with its operands replaced; the result is not canonical.
Expr with_args(const Expr& e, std::vector<Expr> args);

/// Names of builtin function symbols with known derivative and numeric rules.
bool is_builtin_function(const std::string& name);

// ---- queries ------------------------------------------------------------

/// True if `needle` occurs anywhere in `e` (structural match).
bool contains(const Expr& e, const Expr& needle);

/// True if any Parameter/Variable/Jet named `name`, or a function of that name, occurs.
bool mentions(const Expr& e, const std::string& name);

/// Distinct jet coordinates occurring in `e`, in canonical order.
std::vector<Expr> jets_in(const Expr& e);

/// Distinct function applications occurring in `e`, in canonical order.
std::vector<Expr> functions_in(const Expr& e);

/// Number of nodes in the tree.
std::size_t tree_size(const Expr& e);

/// Differential order of a jet coordinate (number of derivatives).
inline std::size_t jet_order(const Expr& jet_coordinate) {
  return jet_coordinate->wrt.size();
}

}  // namespace approxsym
