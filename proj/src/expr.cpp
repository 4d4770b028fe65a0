#include "approxsym/expr.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>
#include <utility>

namespace approxsym {

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& r) {
  return mix(std::hash<long>{}(mpz_get_si(r.get_num_mpz_t())),
             std::hash<long>{}(mpz_get_si(r.get_den_mpz_t())));
}

void compute_hash(Node& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911u;
  h = mix(h, hash_rational(n.value));
  h = mix(h, std::hash<std::string>{}(n.name));
  h = mix(h, std::hash<int>{}(n.index));
  for (const auto& w : n.wrt) h = mix(h, std::hash<std::string>{}(w));
  for (int p : n.partials) h = mix(h, std::hash<int>{}(p));
  for (const auto& a : n.args) h = mix(h, a.hash());
  n.hash = h;
}

Expr finish(Node n) {
  compute_hash(n);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

const Expr& zero_expr() {
  static const Expr z = [] {
    Node n;
    n.kind = Kind::Number;
    n.canonical = true;
    n.value = 0;
    return finish(std::move(n));
  }();
  return z;
}

template <typename T>
int three_way(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare_rational(const Rational& a, const Rational& b) {
  int c = cmp(a, b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool all_canonical(const std::vector<Expr>& v) {
  return std::all_of(v.begin(), v.end(), [](const Expr& e) { return e->canonical; });
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Number: return "number";
    case Kind::Parameter: return "parameter";
    case Kind::Variable: return "variable";
    case Kind::Jet: return "jet";
    case Kind::Function: return "function";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Exp: return "exp";
    case Kind::Power: return "power";
    case Kind::Product: return "product";
    case Kind::Sum: return "sum";
  }
  return "?";
}

Expr::Expr() : node_(zero_expr().node_) {}

Expr::Expr(int value) : Expr(approxsym::number(Rational(value))) {}

Expr::Expr(const Rational& value) : Expr(approxsym::number(value)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Kind Expr::kind() const { return node_->kind; }

std::size_t Expr::hash() const { return node_->hash; }

bool Expr::is_number(long value) const {
  return kind() == Kind::Number && node_->value == value;
}

bool Expr::is_symbol() const {
  Kind k = kind();
  return k == Kind::Parameter || k == Kind::Variable || k == Kind::Jet || k == Kind::Function;
}

const Rational& Expr::number() const {
  if (kind() != Kind::Number) throw std::logic_error("Expr::number on non-number");
  return node_->value;
}

int compare(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return 0;
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.kind != y.kind) return three_way(static_cast<int>(x.kind), static_cast<int>(y.kind));
  if (int c = three_way(x.name, y.name)) return c;
  if (int c = three_way(x.index, y.index)) return c;
  if (int c = compare_rational(x.value, y.value)) return c;
  if (int c = three_way(x.wrt, y.wrt)) return c;
  if (int c = three_way(x.partials, y.partials)) return c;
  std::size_t n = std::min(x.args.size(), y.args.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(x.args[i], y.args[i])) return c;
  }
  return three_way(x.args.size(), y.args.size());
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

Expr number(const Rational& value) {
  if (value == 0) return zero_expr();
  Node n;
  n.kind = Kind::Number;
  n.canonical = true;
  n.value = value;
  n.value.canonicalize();
  return finish(std::move(n));
}

Expr parameter(std::string name) {
  Node n;
  n.kind = Kind::Parameter;
  n.canonical = true;
  n.name = std::move(name);
  return finish(std::move(n));
}

Expr variable(std::string name) {
  Node n;
  n.kind = Kind::Variable;
  n.canonical = true;
  n.name = std::move(name);
  return finish(std::move(n));
}

Expr jet(std::string dep, std::vector<std::string> wrt, int order) {
  Node n;
  n.kind = Kind::Jet;
  n.canonical = true;
  n.name = std::move(dep);
  n.index = order;
  std::sort(wrt.begin(), wrt.end());
  n.wrt = std::move(wrt);
  return finish(std::move(n));
}

Expr function(std::string name, std::vector<Expr> args, std::vector<int> partials, int family) {
  Node n;
  n.kind = Kind::Function;
  n.name = std::move(name);
  n.index = family;
  if (partials.empty()) partials.assign(args.size(), 0);
  if (partials.size() != args.size()) {
    throw std::invalid_argument("function: partial count does not match arity");
  }
  n.partials = std::move(partials);
  // builtins get their symmetry rules from the normalizer
  n.canonical = all_canonical(args) && !is_builtin_function(n.name);
  n.args = std::move(args);
  return finish(std::move(n));
}

namespace {
Expr unary(Kind k, Expr arg) {
  Node n;
  n.kind = k;
  n.args.push_back(std::move(arg));
  return finish(std::move(n));
}
}  // namespace

Expr exp(Expr arg) { return unary(Kind::Exp, std::move(arg)); }
Expr sin(Expr arg) { return unary(Kind::Sin, std::move(arg)); }
Expr cos(Expr arg) { return unary(Kind::Cos, std::move(arg)); }
Expr sqrt(Expr arg) { return pow(std::move(arg), Rational(1, 2)); }

Expr pow(Expr base, const Rational& exponent) {
  Node n;
  n.kind = Kind::Power;
  n.value = exponent;
  n.value.canonicalize();
  n.args.push_back(std::move(base));
  return finish(std::move(n));
}

Expr sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr();
  if (terms.size() == 1) return terms.front();
  Node n;
  n.kind = Kind::Sum;
  n.args = std::move(terms);
  return finish(std::move(n));
}

Expr product(std::vector<Expr> factors) {
  if (factors.empty()) return Expr(1);
  if (factors.size() == 1) return factors.front();
  Node n;
  n.kind = Kind::Product;
  n.args = std::move(factors);
  return finish(std::move(n));
}

Expr make_canonical(Node node) {
  node.canonical = true;
  return finish(std::move(node));
}

Expr with_args(const Expr& e, std::vector<Expr> args) {
  Node n = e.node();
  n.args = std::move(args);
  n.canonical = n.kind == Kind::Function && all_canonical(n.args) && !is_builtin_function(n.name);
  if (n.kind == Kind::Number || n.kind == Kind::Parameter || n.kind == Kind::Variable ||
      n.kind == Kind::Jet) {
    n.canonical = true;
  }
  return finish(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
Expr operator-(const Expr& a) {
  if (a.is_number()) return number(-a.number());
  return product({Expr(-1), a});
}
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, -1)}); }

bool is_builtin_function(const std::string& name) { return name == "dawson"; }

bool contains(const Expr& e, const Expr& needle) {
  if (e == needle) return true;
  for (const auto& a : e->args) {
    if (contains(a, needle)) return true;
  }
  return false;
}

bool mentions(const Expr& e, const std::string& name) {
  const Node& n = e.node();
  if ((n.kind == Kind::Parameter || n.kind == Kind::Variable || n.kind == Kind::Jet ||
       n.kind == Kind::Function) &&
      n.name == name) {
    return true;
  }
  if (n.kind == Kind::Jet &&
      std::find(n.wrt.begin(), n.wrt.end(), name) != n.wrt.end()) {
    return true;
  }
  for (const auto& a : n.args) {
    if (mentions(a, name)) return true;
  }
  return false;
}

namespace {
void collect_kind(const Expr& e, Kind k, std::set<Expr, ExprLess>& out) {
  if (e.kind() == k) out.insert(e);
  for (const auto& a : e->args) collect_kind(a, k, out);
}
}  // namespace

std::vector<Expr> jets_in(const Expr& e) {
  std::set<Expr, ExprLess> out;
  collect_kind(e, Kind::Jet, out);
  return {out.begin(), out.end()};
}

std::vector<Expr> functions_in(const Expr& e) {
  std::set<Expr, ExprLess> out;
  collect_kind(e, Kind::Function, out);
  return {out.begin(), out.end()};
}

std::size_t tree_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e->args) n += tree_size(a);
  return n;
}

}  // namespace approxsym
