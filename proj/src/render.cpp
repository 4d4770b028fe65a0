#include "approxsym/render.hpp"

#include <array>
#include <cctype>
#include <string_view>
#include <vector>

namespace approxsym {

namespace {

bool is_negative_number(const Expr& e) { return e.is_number() && e.number() < 0; }

// Splits off the sign of a term: -3*x renders as "3*x" with negative = true.
struct SignedTerm {
  Rational coefficient = 1;
  std::vector<Expr> factors;  // flattened, numbers folded into coefficient
};

void flatten_into(const Expr& e, SignedTerm& out) {
  if (e.kind() == Kind::Product) {
    for (const auto& f : e->args) flatten_into(f, out);
  } else if (e.is_number()) {
    out.coefficient *= e.number();
  } else {
    out.factors.push_back(e);
  }
}

SignedTerm split_term(const Expr& e) {
  SignedTerm t;
  flatten_into(e, t);
  return t;
}

bool is_negative_term(const Expr& e) {
  if (e.is_number()) return e.number() < 0;
  if (e.kind() != Kind::Product) return false;
  return split_term(e).coefficient < 0;
}

class Renderer {
 public:
  explicit Renderer(Format f) : latex_(f == Format::Latex) {}

  std::string expr(const Expr& e) {
    switch (e.kind()) {
      case Kind::Number: return number(e.number());
      case Kind::Parameter:
      case Kind::Variable: return name(e->name);
      case Kind::Jet: return jet(e);
      case Kind::Function: return function_app(e);
      case Kind::Sin: return call("sin", e->args[0]);
      case Kind::Cos: return call("cos", e->args[0]);
      case Kind::Exp: return call("exp", e->args[0]);
      case Kind::Power:
        if (e->value < 0) return term(e);
        return power(e);
      case Kind::Product: return term(e);
      case Kind::Sum: return sum(e);
    }
    return "?";
  }

 private:
  std::string number(const Rational& r) {
    if (!latex_ || is_integer(r)) return to_string(r);
    std::string sign = r < 0 ? "-" : "";
    Rational a = abs(r);
    return sign + "\\frac{" + a.get_num().get_str() + "}{" + a.get_den().get_str() + "}";
  }

  std::string name(const std::string& n) {
    if (!latex_) return n;
    static constexpr std::array<std::string_view, 24> greek = {
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
        "iota", "kappa", "lambda", "mu", "nu", "xi", "pi", "rho",
        "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega", "varepsilon"};
    std::size_t cut = n.size();
    while (cut > 0 && std::isdigit(static_cast<unsigned char>(n[cut - 1]))) --cut;
    std::string stem = n.substr(0, cut);
    std::string digits = n.substr(cut);
    if (stem == "eps") stem = "\\varepsilon";
    for (auto g : greek) {
      if (stem == g) stem = "\\" + stem;
    }
    if (stem.size() > 1 && stem[0] != '\\') stem = "\\mathrm{" + stem + "}";
    return digits.empty() || stem.empty() ? stem + digits : stem + "_{" + digits + "}";
  }

  std::string jet(const Expr& e) {
    std::string base = latex_ ? name(e->name) : e->name;
    if (latex_) {
      std::string sub;
      if (e->index >= 0) sub += "(" + std::to_string(e->index) + ")";
      for (const auto& w : e->wrt) sub += w;
      return sub.empty() ? base : base + "_{" + sub + "}";
    }
    if (e->index >= 0) base += "[" + std::to_string(e->index) + "]";
    if (e->wrt.empty()) return base;
    std::string out = "D(" + base;
    for (const auto& w : e->wrt) out += "," + w;
    return out + ")";
  }

  std::string args_list(const Expr& e) {
    std::string out;
    for (std::size_t i = 0; i < e->args.size(); ++i) {
      if (i) out += latex_ ? ", " : ",";
      out += expr(e->args[i]);
    }
    return out;
  }

  std::string function_app(const Expr& e) {
    bool derived = false;
    for (int p : e->partials) derived = derived || p != 0;
    std::string head = latex_ ? name(e->name) : e->name;
    if (e->index >= 0) head += latex_ ? "_{(" + std::to_string(e->index) + ")}"
                                      : "[" + std::to_string(e->index) + "]";
    std::string open = latex_ ? "\\left(" : "(";
    std::string close = latex_ ? "\\right)" : ")";
    if (!derived) return head + open + args_list(e) + close;
    if (latex_) {
      if (e->args.size() == 1 && e->partials[0] <= 3) {
        std::string primes;
        for (int i = 0; i < e->partials[0]; ++i) primes += "\\prime";
        return head + "^{" + primes + "}" + open + args_list(e) + close;
      }
      std::string tuple;
      for (std::size_t i = 0; i < e->partials.size(); ++i) {
        if (i) tuple += ",";
        tuple += std::to_string(e->partials[i]);
      }
      return head + "^{(" + tuple + ")}" + open + args_list(e) + close;
    }
    // D(f(t,x),t) is exact only when every argument is a distinct variable.
    bool plain_vars = true;
    for (std::size_t i = 0; i < e->args.size(); ++i) {
      if (e->args[i].kind() != Kind::Variable) plain_vars = false;
      for (std::size_t j = 0; j < i; ++j) {
        if (e->args[i] == e->args[j]) plain_vars = false;
      }
    }
    if (plain_vars) {
      std::string out = "D(" + head + "(" + args_list(e) + ")";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        for (int n = 0; n < e->partials[i]; ++n) out += "," + e->args[i]->name;
      }
      return out + ")";
    }
    std::string out = head + "{";
    for (std::size_t i = 0; i < e->partials.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(e->partials[i]);
    }
    return out + "}(" + args_list(e) + ")";
  }

  std::string call(const char* fn, const Expr& arg) {
    if (latex_) return std::string("\\") + fn + "\\left(" + expr(arg) + "\\right)";
    return std::string(fn) + "(" + expr(arg) + ")";
  }

  std::string paren(const std::string& s) {
    return latex_ ? "\\left(" + s + "\\right)" : "(" + s + ")";
  }

  bool atomic(const Expr& e) {
    switch (e.kind()) {
      case Kind::Number: return is_integer(e.number()) && e.number() >= 0;
      case Kind::Sum:
      case Kind::Product:
      case Kind::Power: return false;
      default: return true;
    }
  }

  std::string power(const Expr& e) {
    const Expr& base = e->args[0];
    const Rational& r = e->value;
    if (r == Rational(1, 2)) {
      return latex_ ? "\\sqrt{" + expr(base) + "}" : "sqrt(" + expr(base) + ")";
    }
    std::string b = atomic(base) ? expr(base) : paren(expr(base));
    if (latex_) {
      std::string ex = is_integer(r) ? to_string(r) : to_string(r.get_num()) + "/" + to_string(r.get_den());
      return b + "^{" + ex + "}";
    }
    std::string ex = is_integer(r) && r > 0 ? to_string(r) : "(" + to_string(r) + ")";
    return b + "^" + ex;
  }

  // Factor as it appears inside a product.
  std::string factor(const Expr& f) {
    if (f.kind() == Kind::Sum) return paren(expr(f));
    if (is_negative_number(f)) return paren(expr(f));
    return expr(f);
  }

  static bool has_top_level_product(const std::string& s) {
    int depth = 0;
    for (char ch : s) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (depth == 0 && (ch == '*' || ch == '/')) return true;
    }
    return false;
  }

  std::string join_factors(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
      if (out.empty()) {
        out = p;
      } else if (latex_) {
        bool space = !p.empty() && std::isalnum(static_cast<unsigned char>(p[0]));
        out += space ? " " + p : p;
      } else {
        out += "*" + p;
      }
    }
    return out;
  }

  // Magnitude of a product term; the sign is reported separately.
  std::string magnitude(const SignedTerm& t) {
    Rational c = abs(t.coefficient);
    std::vector<std::string> num;
    std::vector<std::string> den;
    if (c.get_num() != 1) num.push_back(c.get_num().get_str());
    if (c.get_den() != 1) den.push_back(c.get_den().get_str());
    for (const auto& f : t.factors) {
      if (f.kind() == Kind::Power && f->value < 0) {
        Expr flipped = f->value == -1 ? f->args[0] : pow(f->args[0], -f->value);
        // a/(b*c) and a/(1/b): anything with its own * or / goes in parentheses
        std::string d = factor(flipped);
        den.push_back(!latex_ && has_top_level_product(d) ? paren(d) : d);
      } else {
        num.push_back(factor(f));
      }
    }
    std::string n = num.empty() ? "1" : join_factors(num);
    if (den.empty()) return n;
    if (latex_) return "\\frac{" + n + "}{" + join_factors(den) + "}";
    std::string d = join_factors(den);
    if (den.size() > 1) d = "(" + d + ")";
    return n + "/" + d;
  }

  std::string term(const Expr& e) {
    SignedTerm t = split_term(e);
    if (t.factors.empty()) return number(t.coefficient);
    std::string m = magnitude(t);
    return t.coefficient < 0 ? "-" + m : m;
  }

  std::string sum(const Expr& e) {
    std::string out;
    bool first = true;
    for (const auto& t : e->args) {
      bool negative = is_negative_term(t);
      std::string body;
      if (negative) {
        SignedTerm s = split_term(t);
        body = s.factors.empty() ? number(-s.coefficient) : magnitude(s);
      } else {
        body = t.kind() == Kind::Sum ? paren(expr(t)) : expr(t);
      }
      if (first) {
        out = negative ? "-" + body : body;
        first = false;
      } else if (latex_) {
        out += (negative ? "-" : "+") + body;
      } else {
        out += (negative ? " - " : " + ") + body;
      }
    }
    return out;
  }

  bool latex_;
};

}  // namespace

std::string render(const Expr& e, Format format) {
  Renderer r(format);
  return r.expr(e);
}

std::string tree_string(const Expr& e) {
  if (e.is_number()) return to_string(e->value);
  std::string out = std::string("(") + kind_name(e.kind());
  if (!e->name.empty()) out += " " + e->name;
  if (e->index >= 0) out += " [" + std::to_string(e->index) + "]";
  for (const auto& w : e->wrt) out += " /" + w;
  if (!e->partials.empty()) {
    out += " {";
    for (std::size_t i = 0; i < e->partials.size(); ++i) out += (i ? "," : "") + std::to_string(e->partials[i]);
    out += "}";
  }
  if (e.kind() == Kind::Power) out += " ^" + to_string(e->value);
  for (const auto& a : e->args) out += " " + tree_string(a);
  return out + ")";
}

}  // namespace approxsym
