#include "approxsym/calculus.hpp"

#include <unordered_map>

#include "approxsym/normalize.hpp"

namespace approxsym {

namespace {

class Deriver {
 public:
  explicit Deriver(const Derivation& d) : d_(d) {}

  Expr operator()(const Expr& e) {
    if (auto it = memo_.find(e); it != memo_.end()) return it->second;
    Expr r = compute(e);
    memo_.emplace(e, r);
    return r;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case Kind::Number: return Expr();
      case Kind::Parameter:
      case Kind::Variable:
      case Kind::Jet: {
        if (d_.atom) {
          if (auto r = d_.atom(e)) return *r;
        }
        return Expr();
      }
      case Kind::Function: {
        if (d_.atom) {
          if (auto r = d_.atom(e)) return *r;
        }
        std::vector<Expr> terms;
        if (is_builtin_function(e->name) && e->args.size() == 1 && e->partials[0] == 0) {
          // dawson'(y) = 1 - 2 y dawson(y)
          Expr dy = (*this)(e->args[0]);
          if (!dy.is_number(0)) terms.push_back((1 - 2 * e->args[0] * e) * dy);
        } else {
          for (std::size_t j = 0; j < e->args.size(); ++j) {
            Expr da = (*this)(e->args[j]);
            if (!da.is_number(0)) terms.push_back(function_partial(e, j) * da);
          }
        }
        if (d_.function_extra) {
          Expr extra = d_.function_extra(e);
          if (!extra.is_number(0)) terms.push_back(extra);
        }
        return sum(std::move(terms));
      }
      case Kind::Sin: {
        Expr da = (*this)(e->args[0]);
        if (da.is_number(0)) return da;
        return cos(e->args[0]) * da;
      }
      case Kind::Cos: {
        Expr da = (*this)(e->args[0]);
        if (da.is_number(0)) return da;
        return -(sin(e->args[0]) * da);
      }
      case Kind::Exp: {
        Expr da = (*this)(e->args[0]);
        if (da.is_number(0)) return da;
        return e * da;
      }
      case Kind::Power: {
        Expr db = (*this)(e->args[0]);
        if (db.is_number(0)) return db;
        return product({number(e->value), pow(e->args[0], e->value - 1), db});
      }
      case Kind::Product: {
        std::vector<Expr> terms;
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          Expr df = (*this)(e->args[i]);
          if (df.is_number(0)) continue;
          std::vector<Expr> factors;
          factors.reserve(e->args.size());
          for (std::size_t j = 0; j < e->args.size(); ++j) {
            factors.push_back(i == j ? df : e->args[j]);
          }
          terms.push_back(product(std::move(factors)));
        }
        return sum(std::move(terms));
      }
      case Kind::Sum: {
        std::vector<Expr> terms;
        for (const auto& t : e->args) {
          Expr dt = (*this)(t);
          if (!dt.is_number(0)) terms.push_back(dt);
        }
        return sum(std::move(terms));
      }
    }
    return Expr();
  }

  const Derivation& d_;
  std::unordered_map<Expr, Expr, ExprHash> memo_;
};

Expr replace_impl(const Expr& e, const Bindings& bindings,
                  std::unordered_map<Expr, Expr, ExprHash>& memo) {
  if (auto it = bindings.find(e); it != bindings.end()) return it->second;
  if (e->args.empty()) return e;
  if (auto it = memo.find(e); it != memo.end()) return it->second;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (const auto& a : e->args) {
    args.push_back(replace_impl(a, bindings, memo));
    changed = changed || !args.back().same_node(a);
  }
  Expr r = changed ? with_args(e, std::move(args)) : e;
  memo.emplace(e, r);
  return r;
}

}  // namespace

Expr derive(const Expr& e, const Derivation& d) {
  Deriver run(d);
  return normalize(run(normalize(e)));
}

Expr diff(const Expr& e, const Expr& v) {
  switch (v.kind()) {
    case Kind::Parameter:
    case Kind::Variable:
    case Kind::Jet:
    case Kind::Function:
      break;
    default:
      throw UndeclaredSymbol("cannot differentiate with respect to a compound expression");
  }
  Expr target = normalize(v);
  Derivation d;
  d.atom = [&](const Expr& a) -> std::optional<Expr> {
    if (a == target) return Expr(1);
    if (a.kind() == Kind::Function) return std::nullopt;
    return Expr();
  };
  return derive(e, d);
}

Expr function_partial(const Expr& application, std::size_t slot) {
  std::vector<int> partials = application->partials;
  partials.at(slot) += 1;
  return function(application->name, application->args, std::move(partials), application->index);
}

Expr replace(const Expr& e, const Bindings& bindings) {
  std::unordered_map<Expr, Expr, ExprHash> memo;
  return replace_impl(e, bindings, memo);
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (bindings.empty()) return normalize(e);
  Bindings normalized;
  for (const auto& [k, v] : bindings) normalized.emplace(normalize(k), v);
  return normalize(replace(normalize(e), normalized));
}

namespace {

Expr substitute_function_impl(const Expr& e, const FunctionDefinition& def,
                              std::map<std::vector<int>, Expr>& derivatives,
                              std::unordered_map<Expr, Expr, ExprHash>& memo) {
  if (e->args.empty()) return e;
  if (auto it = memo.find(e); it != memo.end()) return it->second;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) args.push_back(substitute_function_impl(a, def, derivatives, memo));
  Expr r;
  if (e.kind() == Kind::Function && e->name == def.name && e->index == def.family &&
      e->args.size() == def.formals.size()) {
    auto it = derivatives.find(e->partials);
    if (it == derivatives.end()) {
      Expr body = def.body;
      for (std::size_t j = 0; j < def.formals.size(); ++j) {
        for (int n = 0; n < e->partials[j]; ++n) body = diff(body, def.formals[j]);
      }
      it = derivatives.emplace(e->partials, body).first;
    }
    Bindings actual;
    for (std::size_t j = 0; j < def.formals.size(); ++j) actual.emplace(def.formals[j], args[j]);
    r = replace(it->second, actual);
  } else {
    r = with_args(e, std::move(args));
  }
  memo.emplace(e, r);
  return r;
}

}  // namespace

Expr substitute_function(const Expr& e, const FunctionDefinition& def) {
  std::map<std::vector<int>, Expr> derivatives;
  std::unordered_map<Expr, Expr, ExprHash> memo;
  return normalize(substitute_function_impl(normalize(e), def, derivatives, memo));
}

}  // namespace approxsym
