#include "approxsym/normalize.hpp"

#include <algorithm>
#include <utility>

namespace approxsym {

namespace {

int sign_of(int c) { return c < 0 ? -1 : (c > 0 ? 1 : 0); }

int compare_factor(const Factor& a, const Factor& b) {
  if (int c = compare(a.base, b.base)) return c;
  return sign_of(cmp(a.exponent, b.exponent));
}

Rational degree_of(const std::vector<Factor>& factors) {
  Rational d = 0;
  for (const auto& f : factors) d += f.exponent;
  return d;
}

Monomial make_monomial(std::vector<Factor> factors, Expr exp_arg) {
  Monomial m;
  m.degree = degree_of(factors);
  m.factors = std::move(factors);
  m.exp_arg = std::move(exp_arg);
  return m;
}

Rational rational_pow(const Rational& base, long exponent) {
  if (exponent == 0) return 1;
  if (base == 0) {
    if (exponent < 0) throw DomainError("division by zero");
    return 0;
  }
  unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational r = exponent > 0 ? Rational(num, den) : Rational(den, num);
  r.canonicalize();
  return r;
}

long to_long(const Rational& integer) { return mpz_get_si(integer.get_num_mpz_t()); }

void add_into(Poly& acc, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = acc.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) acc.erase(it);
  }
}

Poly constant_poly(const Rational& c) {
  Poly p;
  if (c != 0) p.emplace(make_monomial({}, Expr()), c);
  return p;
}

bool is_zero_expr(const Expr& e) { return e.is_number(0); }

Expr add_args(const Expr& a, const Expr& b) {
  if (is_zero_expr(a)) return b;
  if (is_zero_expr(b)) return a;
  return to_expr(poly_add(to_poly(a), to_poly(b)));
}

Expr scale_arg(const Expr& a, const Rational& r) {
  if (is_zero_expr(a)) return a;
  return to_expr(poly_scale(to_poly(a), r));
}

// Sorts and merges equal bases, dropping zero exponents.
std::vector<Factor> merge_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return compare(a.base, b.base) < 0; });
  std::vector<Factor> out;
  out.reserve(factors.size());
  for (auto& f : factors) {
    if (!out.empty() && out.back().base == f.base) {
      out.back().exponent += f.exponent;
    } else {
      out.push_back(std::move(f));
    }
  }
  std::erase_if(out, [](const Factor& f) { return f.exponent == 0; });
  return out;
}

// Folds numeric bases: integer parts go to the coefficient, exact roots are
// extracted, and what remains keeps an exponent in (0, 1).
void fold_numeric_factors(Rational& coeff, std::vector<Factor>& factors) {
  std::vector<Factor> kept;
  kept.reserve(factors.size());
  for (auto& f : factors) {
    if (!f.base.is_number()) {
      kept.push_back(std::move(f));
      continue;
    }
    const Rational& b = f.base.number();
    if (b == 1) continue;
    Rational whole = floor(f.exponent);
    Rational frac = f.exponent - whole;
    coeff *= rational_pow(b, to_long(whole));
    if (frac == 0) continue;
    unsigned long q = mpz_get_ui(frac.get_den_mpz_t());
    long p = mpz_get_si(frac.get_num_mpz_t());
    if (b == -1) {
      if (q % 2 == 1) {
        coeff *= (p % 2 == 0) ? 1 : -1;
        continue;
      }
    } else if (auto root = exact_root(b.get_num(), q)) {
      coeff *= rational_pow(Rational(*root), p);
      continue;
    }
    kept.push_back(Factor{f.base, frac});
  }
  factors = merge_factors(std::move(kept));
}

Poly canonical_term(Rational coeff, std::vector<Factor> factors, Expr exp_arg);

Poly sin_square_identity(const Expr& sin_kernel) {
  // sin(a)^2 = 1 - cos(a)^2
  Node cos_node;
  cos_node.kind = Kind::Cos;
  cos_node.args = sin_kernel->args;
  Expr cos_kernel = make_canonical(std::move(cos_node));
  Poly p = constant_poly(1);
  add_into(p, make_monomial({Factor{cos_kernel, 2}}, Expr()), -1);
  return p;
}

Poly canonical_term(Rational coeff, std::vector<Factor> factors, Expr exp_arg) {
  if (coeff == 0) return {};
  factors = merge_factors(std::move(factors));
  fold_numeric_factors(coeff, factors);
  if (coeff == 0) return {};
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const Factor& f = factors[i];
    if (f.base.kind() == Kind::Sum && f.exponent >= 1) {
      Rational whole = floor(f.exponent);
      Rational frac = f.exponent - whole;
      Expr base = f.base;
      std::vector<Factor> rest = factors;
      if (frac == 0) {
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        rest[i].exponent = frac;
      }
      Poly head = canonical_term(coeff, std::move(rest), exp_arg);
      return poly_mul(head, poly_pow(to_poly(base), whole));
    }
    if (f.base.kind() == Kind::Sin && f.exponent >= 2) {
      Expr base = f.base;
      std::vector<Factor> rest = factors;
      rest[i].exponent -= 2;
      Poly head = canonical_term(coeff, std::move(rest), exp_arg);
      return poly_mul(head, sin_square_identity(base));
    }
  }
  Poly p;
  p.emplace(make_monomial(std::move(factors), std::move(exp_arg)), coeff);
  return p;
}

Poly single_factor(const Expr& kernel, const Rational& exponent = 1) {
  return canonical_term(1, {Factor{kernel, exponent}}, Expr());
}

// Splits a canonical single term into coefficient and monomial.
std::pair<Rational, Monomial> decompose_term(const Expr& t) {
  Rational coeff = 1;
  std::vector<Factor> factors;
  Expr exp_arg;
  auto take = [&](const Expr& f) {
    switch (f.kind()) {
      case Kind::Number: coeff *= f.number(); break;
      case Kind::Exp: exp_arg = f->args[0]; break;
      case Kind::Power: factors.push_back(Factor{f->args[0], f->value}); break;
      default: factors.push_back(Factor{f, 1}); break;
    }
  };
  if (t.kind() == Kind::Product) {
    for (const auto& f : t->args) take(f);
  } else {
    take(t);
  }
  return {coeff, make_monomial(std::move(factors), std::move(exp_arg))};
}

Poly decompose(const Expr& e) {
  Poly p;
  if (e.is_number(0)) return p;
  if (e.kind() == Kind::Sum) {
    for (const auto& t : e->args) {
      auto [c, m] = decompose_term(t);
      p.emplace(std::move(m), c);
    }
    return p;
  }
  auto [c, m] = decompose_term(e);
  p.emplace(std::move(m), c);
  return p;
}

// Coefficient sign of the leading term, 0 for the zero polynomial.
int leading_sign(const Poly& p) {
  if (p.empty()) return 0;
  return sgn(p.begin()->second);
}

Poly normalize_sin_cos(Kind kind, const Expr& raw_arg) {
  Poly arg = to_poly(raw_arg);
  if (arg.empty()) return kind == Kind::Sin ? Poly{} : constant_poly(1);
  Rational sign = 1;
  if (leading_sign(arg) < 0) {
    arg = poly_scale(arg, -1);
    if (kind == Kind::Sin) sign = -1;
  }
  Node n;
  n.kind = kind;
  n.args.push_back(to_expr(arg));
  return poly_scale(single_factor(make_canonical(std::move(n))), sign);
}

Poly normalize_function(const Expr& e) {
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) args.push_back(normalize(a));
  Rational sign = 1;
  if (is_builtin_function(e->name) && args.size() == 1) {
    // dawson is odd
    Poly a = to_poly(args[0]);
    if (a.empty()) return {};
    if (leading_sign(a) < 0) {
      args[0] = to_expr(poly_scale(a, -1));
      int order = e->partials.empty() ? 0 : e->partials[0];
      if (order % 2 == 0) sign = -1;
    }
  }
  Expr f = function(e->name, std::move(args), e->partials, e->index);
  return poly_scale(single_factor(f), sign);
}

}  // namespace

int compare(const Monomial& a, const Monomial& b) {
  if (int c = sign_of(cmp(a.degree, b.degree))) return c;
  std::size_t n = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_factor(a.factors[i], b.factors[i])) return c;
  }
  if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size() ? -1 : 1;
  return compare(a.exp_arg, b.exp_arg);
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) add_into(out, m, c);
  return out;
}

Poly poly_scale(const Poly& a, const Rational& c) {
  if (c == 0) return {};
  Poly out;
  for (const auto& [m, k] : a) out.emplace_hint(out.end(), m, k * c);
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::vector<Factor> factors = ma.factors;
      factors.insert(factors.end(), mb.factors.begin(), mb.factors.end());
      Poly term = canonical_term(ca * cb, std::move(factors), add_args(ma.exp_arg, mb.exp_arg));
      for (const auto& [m, c] : term) add_into(out, m, c);
    }
  }
  return out;
}

Poly poly_pow(const Poly& a, const Rational& exponent) {
  if (a.empty()) {
    if (exponent > 0) return {};
    throw DomainError("zero raised to a non-positive power");
  }
  if (exponent == 0) return constant_poly(1);
  if (exponent == 1) return a;

  if (a.size() == 1) {
    const auto& [m, c] = *a.begin();
    std::vector<Factor> factors;
    factors.reserve(m.factors.size() + 3);
    for (const auto& f : m.factors) factors.push_back(Factor{f.base, f.exponent * exponent});
    Rational coeff = 1;
    if (is_integer(exponent)) {
      coeff = rational_pow(c, to_long(exponent));
    } else {
      mpz_class num = abs(c.get_num());
      mpz_class den = c.get_den();
      if (num != 1) factors.push_back(Factor{number(Rational(num)), exponent});
      if (den != 1) factors.push_back(Factor{number(Rational(den)), -exponent});
      if (c < 0) factors.push_back(Factor{number(-1), exponent});
    }
    return canonical_term(coeff, std::move(factors), scale_arg(m.exp_arg, exponent));
  }

  if (is_integer(exponent) && exponent > 0) {
    unsigned long e = mpz_get_ui(exponent.get_num_mpz_t());
    Poly result = constant_poly(1);
    Poly base = a;
    while (e > 0) {
      if (e & 1UL) result = poly_mul(result, base);
      e >>= 1UL;
      if (e > 0) base = poly_mul(base, base);
    }
    return result;
  }

  // Irreducible sum under a negative or fractional power: pull out the
  // rational content, the common monomial and a shared exponential first.
  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& [m, c] : a) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  g = abs(g);
  Rational content(g, l);
  content.canonicalize();
  if (is_integer(exponent) && leading_sign(a) < 0) content = -content;

  std::vector<Factor> common = a.begin()->first.factors;
  Expr common_exp = a.begin()->first.exp_arg;
  for (const auto& [m, c] : a) {
    std::vector<Factor> next;
    for (const auto& f : common) {
      auto it = std::find_if(m.factors.begin(), m.factors.end(),
                             [&](const Factor& g2) { return g2.base == f.base; });
      if (it != m.factors.end()) next.push_back(Factor{f.base, std::min(f.exponent, it->exponent)});
    }
    common = std::move(next);
    if (common_exp != m.exp_arg) common_exp = Expr();
  }

  Poly reduced;
  for (const auto& [m, c] : a) {
    std::vector<Factor> factors = m.factors;
    for (const auto& f : common) factors.push_back(Factor{f.base, -f.exponent});
    Expr exp_arg = common_exp.is_number(0) ? m.exp_arg : Expr();
    Poly t = canonical_term(c / content, std::move(factors), exp_arg);
    for (const auto& [mm, cc] : t) add_into(reduced, mm, cc);
  }

  Poly head = canonical_term(content, common, common_exp);
  Poly kernel_part;
  if (reduced.size() == 1) {
    kernel_part = poly_pow(reduced, exponent);
  } else {
    kernel_part = single_factor(to_expr(reduced), exponent);
  }
  return poly_mul(poly_pow(head, exponent), kernel_part);
}

Expr monomial_expr(const Monomial& m) {
  std::vector<Expr> parts;
  parts.reserve(m.factors.size() + 1);
  for (const auto& f : m.factors) {
    if (f.exponent == 1) {
      parts.push_back(f.base);
    } else {
      Node n;
      n.kind = Kind::Power;
      n.value = f.exponent;
      n.args.push_back(f.base);
      parts.push_back(make_canonical(std::move(n)));
    }
  }
  if (!m.exp_arg.is_number(0)) {
    Node n;
    n.kind = Kind::Exp;
    n.args.push_back(m.exp_arg);
    parts.push_back(make_canonical(std::move(n)));
  }
  if (parts.empty()) return Expr(1);
  if (parts.size() == 1) return parts.front();
  Node n;
  n.kind = Kind::Product;
  n.args = std::move(parts);
  return make_canonical(std::move(n));
}

namespace {
Expr term_expr(const Monomial& m, const Rational& c) {
  Expr body = monomial_expr(m);
  if (body.is_number(1)) return number(c);
  if (c == 1) return body;
  Node n;
  n.kind = Kind::Product;
  n.args.push_back(number(c));
  if (body.kind() == Kind::Product) {
    n.args.insert(n.args.end(), body->args.begin(), body->args.end());
  } else {
    n.args.push_back(body);
  }
  return make_canonical(std::move(n));
}
}  // namespace

Expr to_expr(const Poly& p) {
  if (p.empty()) return Expr();
  if (p.size() == 1) return term_expr(p.begin()->first, p.begin()->second);
  Node n;
  n.kind = Kind::Sum;
  n.args.reserve(p.size());
  for (const auto& [m, c] : p) n.args.push_back(term_expr(m, c));
  return make_canonical(std::move(n));
}

Poly to_poly(const Expr& e) {
  if (e->canonical) {
    switch (e.kind()) {
      case Kind::Number:
      case Kind::Sum:
      case Kind::Product:
      case Kind::Power:
      case Kind::Exp:
        return decompose(e);
      default:
        return single_factor(e);
    }
  }
  switch (e.kind()) {
    case Kind::Number: return constant_poly(e.number());
    case Kind::Parameter:
    case Kind::Variable:
    case Kind::Jet: return single_factor(e);
    case Kind::Function: return normalize_function(e);
    case Kind::Sin:
    case Kind::Cos: return normalize_sin_cos(e.kind(), e->args[0]);
    case Kind::Exp: {
      Poly arg = to_poly(e->args[0]);
      if (arg.empty()) return constant_poly(1);
      Poly p;
      p.emplace(make_monomial({}, to_expr(arg)), 1);
      return p;
    }
    case Kind::Power: {
      const Expr& base = e->args[0];
      // (a*b)^n and (a^m)^n for integer n, before a^m gets expanded
      if (is_integer(e->value) && base.kind() == Kind::Product) {
        Poly acc = constant_poly(1);
        for (const auto& f : base->args) acc = poly_mul(acc, to_poly(pow(f, e->value)));
        return acc;
      }
      if (is_integer(e->value) && base.kind() == Kind::Power && !base->canonical) {
        return to_poly(pow(base->args[0], base->value * e->value));
      }
      return poly_pow(to_poly(base), e->value);
    }
    case Kind::Product: {
      Poly acc = constant_poly(1);
      for (const auto& f : e->args) {
        acc = poly_mul(acc, to_poly(f));
        if (acc.empty()) break;
      }
      return acc;
    }
    case Kind::Sum: {
      Poly acc;
      for (const auto& t : e->args) acc = poly_add(acc, to_poly(t));
      return acc;
    }
  }
  return {};
}

Expr normalize(const Expr& e) {
  if (e->canonical) return e;
  return to_expr(to_poly(e));
}

Fraction together(const Expr& e) {
  Poly num = to_poly(e);
  Poly den = constant_poly(1);
  for (int round = 0; !num.empty(); ++round) {
    if (round == 64) throw DomainError("denominators could not be cleared");
    std::vector<Factor> lowest;
    bool first = true;
    for (const auto& [m, c] : num) {
      std::vector<Factor> next;
      if (first) {
        for (const auto& f : m.factors) {
          if (!f.base.is_number()) next.push_back(f);
        }
        first = false;
      } else {
        // min over terms; absent bases count as exponent 0
        for (const auto& f : lowest) {
          auto it = std::find_if(m.factors.begin(), m.factors.end(),
                                 [&](const Factor& g) { return g.base == f.base; });
          Rational x = it == m.factors.end() ? Rational(0) : it->exponent;
          next.push_back(Factor{f.base, std::min(f.exponent, x)});
        }
        for (const auto& g : m.factors) {
          if (g.base.is_number() || g.exponent >= 0) continue;
          bool seen = std::any_of(lowest.begin(), lowest.end(),
                                  [&](const Factor& f) { return f.base == g.base; });
          if (!seen) next.push_back(Factor{g.base, g.exponent});
        }
      }
      lowest = std::move(next);
    }
    std::vector<Factor> multiplier;
    for (const auto& f : lowest) {
      if (f.exponent < 0) multiplier.push_back(Factor{f.base, -f.exponent});
    }
    if (num.size() == 1) {
      // a single term: only the negative powers need clearing
      multiplier.clear();
      for (const auto& f : num.begin()->first.factors) {
        if (!f.base.is_number() && f.exponent < 0) multiplier.push_back(Factor{f.base, -f.exponent});
      }
    }
    if (multiplier.empty()) break;
    // term by term, so that a kernel cancels before the rest is expanded
    Poly next;
    for (const auto& [m, c] : num) {
      std::vector<Factor> factors = m.factors;
      factors.insert(factors.end(), multiplier.begin(), multiplier.end());
      for (const auto& [mm, cc] : canonical_term(c, std::move(factors), m.exp_arg)) add_into(next, mm, cc);
    }
    num = std::move(next);
    den = poly_mul(den, canonical_term(1, multiplier, Expr()));
  }
  return Fraction{to_expr(num), to_expr(den)};
}

bool is_zero(const Expr& e) {
  Expr n = normalize(e);
  if (n.is_number(0)) return true;
  return together(n).numerator.is_number(0);
}

Expr simplify(const Expr& e) {
  Fraction f = together(e);
  if (f.numerator.is_number(0)) return Expr();
  if (f.denominator.is_number(1)) return f.numerator;
  return product({f.numerator, pow(f.denominator, -1)});
}

std::vector<Expr> terms_of(const Expr& canonical) {
  if (canonical.is_number(0)) return {};
  if (canonical.kind() == Kind::Sum) return canonical->args;
  return {canonical};
}

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
  if (term.is_number()) return {term.number(), Expr(1)};
  if (term.kind() == Kind::Product && term->args.front().is_number()) {
    std::vector<Expr> rest(term->args.begin() + 1, term->args.end());
    if (rest.size() == 1) return {term->args.front().number(), rest.front()};
    Node n;
    n.kind = Kind::Product;
    n.args = std::move(rest);
    return {term->args.front().number(), make_canonical(std::move(n))};
  }
  return {Rational(1), term};
}

}  // namespace approxsym
