#include "approxsym/series.hpp"

#include <algorithm>
#include <map>

#include "approxsym/normalize.hpp"

namespace approxsym {

namespace {

bool occurs_in(const Expr& e, const std::vector<Expr>& vars) {
  return std::any_of(vars.begin(), vars.end(), [&](const Expr& v) { return contains(e, v); });
}

bool is_one_of(const Expr& e, const std::vector<Expr>& vars) {
  return std::find(vars.begin(), vars.end(), e) != vars.end();
}

std::string describe(const Expr& v) {
  return v->name.empty() ? std::string(kind_name(v.kind())) : v->name;
}

}  // namespace

std::vector<MonomialTerm> collect_by_monomials(const Expr& e, const std::vector<Expr>& raw_vars) {
  std::vector<Expr> vars;
  vars.reserve(raw_vars.size());
  for (const auto& v : raw_vars) vars.push_back(normalize(v));

  std::map<Monomial, Poly, MonomialLess> groups;
  for (const auto& [m, c] : to_poly(e)) {
    std::vector<Factor> split;
    std::vector<Factor> rest;
    for (const auto& f : m.factors) {
      if (is_one_of(f.base, vars)) {
        if (!is_integer(f.exponent) || f.exponent < 0) {
          throw NonPolynomialError("non-polynomial power of " + describe(f.base));
        }
        split.push_back(f);
      } else if (occurs_in(f.base, vars)) {
        throw NonPolynomialError("split variable occurs inside a non-polynomial kernel");
      } else {
        rest.push_back(f);
      }
    }
    if (occurs_in(m.exp_arg, vars)) {
      throw NonPolynomialError("split variable occurs inside an exponential");
    }
    Monomial key;
    key.degree = 0;
    for (const auto& f : split) key.degree += f.exponent;
    key.factors = std::move(split);
    Monomial body;
    body.degree = 0;
    for (const auto& f : rest) body.degree += f.exponent;
    body.factors = std::move(rest);
    body.exp_arg = m.exp_arg;
    Poly& group = groups[key];
    auto [it, inserted] = group.try_emplace(body, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) group.erase(it);
    }
  }
  std::vector<MonomialTerm> out;
  for (auto& [key, poly] : groups) {
    if (poly.empty()) continue;
    out.push_back(MonomialTerm{monomial_expr(key), to_expr(poly)});
  }
  return out;
}

std::vector<Expr> series_coefficients(const Expr& e, const Expr& eps, int p) {
  std::vector<Expr> out(static_cast<std::size_t>(std::max(p + 1, 0)));
  std::vector<Poly> acc(out.size());
  Expr small = normalize(eps);
  for (const auto& [m, c] : to_poly(e)) {
    long degree = 0;
    Monomial body;
    body.degree = 0;
    for (const auto& f : m.factors) {
      if (f.base == small) {
        if (!is_integer(f.exponent) || f.exponent < 0) {
          throw NonPolynomialError(describe(small) + " occurs with a non-polynomial power");
        }
        degree = mpz_get_si(f.exponent.get_num_mpz_t());
      } else if (contains(f.base, small)) {
        throw NonPolynomialError(describe(small) + " occurs inside a non-polynomial kernel");
      } else {
        body.factors.push_back(f);
        body.degree += f.exponent;
      }
    }
    if (contains(m.exp_arg, small)) {
      throw NonPolynomialError(describe(small) + " occurs inside an exponential");
    }
    body.exp_arg = m.exp_arg;
    if (degree > p) continue;
    Poly& target = acc[static_cast<std::size_t>(degree)];
    auto [it, inserted] = target.try_emplace(body, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) target.erase(it);
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = to_expr(acc[k]);
  return out;
}

Expr series_sum(const std::vector<Expr>& coefficients, const Expr& eps) {
  std::vector<Expr> terms;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (coefficients[k].is_number(0)) continue;
    terms.push_back(k == 0 ? coefficients[k]
                           : product({pow(eps, static_cast<long>(k)), coefficients[k]}));
  }
  return normalize(sum(std::move(terms)));
}

Expr truncate_series(const Expr& e, const Expr& eps, int p) {
  return series_sum(series_coefficients(e, eps, p), eps);
}

std::optional<Expr> solve_linear(const Expr& e, const Expr& var) {
  std::vector<MonomialTerm> parts;
  try {
    parts = collect_by_monomials(e, {var});
  } catch (const NonPolynomialError&) {
    return std::nullopt;
  }
  Expr constant;
  Expr slope;
  for (const auto& part : parts) {
    if (part.monomial.is_number(1)) {
      constant = part.coefficient;
    } else if (part.monomial == normalize(var)) {
      slope = part.coefficient;
    } else {
      return std::nullopt;
    }
  }
  if (is_zero(slope)) return std::nullopt;
  return normalize(-constant / slope);
}

int series_degree(const Expr& e, const Expr& eps) {
  Expr small = normalize(eps);
  int best = -1;
  for (const auto& [m, c] : to_poly(e)) {
    int degree = 0;
    for (const auto& f : m.factors) {
      if (f.base == small) degree = static_cast<int>(mpz_get_si(f.exponent.get_num_mpz_t()));
    }
    best = std::max(best, degree);
  }
  return best;
}

}  // namespace approxsym
