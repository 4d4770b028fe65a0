#include "approxsym/perturb.hpp"

#include <algorithm>

#include "approxsym/calculus.hpp"
#include "approxsym/normalize.hpp"
#include "approxsym/series.hpp"

namespace approxsym {

Expr PerturbationContext::coefficient(const std::string& dependent, int k,
                                      const MultiIndex& counts) const {
  MultiIndex s = counts;
  s.resize(independents.size(), 0);
  return JetCoordinate{dependent, s, k}.to_expr(independents);
}

Expr PerturbationContext::series(const std::string& dependent, const MultiIndex& counts) const {
  std::vector<Expr> terms;
  for (int k = 0; k <= order; ++k) {
    Expr c = coefficient(dependent, k, counts);
    terms.push_back(k == 0 ? c : k == 1 ? product({eps, c}) : product({pow(eps, k), c}));
  }
  return sum(std::move(terms));
}

namespace {

Expr replace_dependents(const PerturbationContext& ctx, const Expr& e) {
  Bindings b;
  for (const auto& j : jets_in(e)) {
    if (j->index >= 0) continue;
    b.emplace(j, ctx.series(j->name, coordinate_of(j, ctx.independents).counts));
  }
  return replace(e, b);
}

}  // namespace

namespace {

// Truncated power series in eps, built bottom-up. Repeatedly differentiating
// the whole expression in eps gets very slow once kernels nest.
class SeriesBuilder {
 public:
  SeriesBuilder(Expr eps, int p) : eps_(std::move(eps)), p_(p) {}

  std::vector<Expr> operator()(const Expr& e) const {
    std::vector<Expr> out = constant(number(0));
    if (!contains(e, eps_)) {
      out[0] = e;
      return out;
    }
    if (e == eps_) {
      if (p_ >= 1) out[1] = number(1);
      return out;
    }
    switch (e.kind()) {
      case Kind::Sum: {
        for (const auto& t : e->args) {
          auto c = (*this)(t);
          for (int k = 0; k <= p_; ++k) out[k] = normalize(out[k] + c[k]);
        }
        return out;
      }
      case Kind::Product: {
        out[0] = number(1);
        for (const auto& f : e->args) out = multiply(out, (*this)(f));
        return out;
      }
      case Kind::Power: {
        auto base = (*this)(e->args[0]);
        const Rational& r = e->value;
        if (is_integer(r) && r >= 0) {
          out[0] = number(1);
          for (long n = r.get_num().get_si(); n > 0; --n) out = multiply(out, base);
          return out;
        }
        if (base[0].is_number(0)) throw NonPolynomialError("eps occurs under a singular power");
        return compose(pow(probe(0), r), {base});
      }
      case Kind::Exp: return compose(exp(probe(0)), {(*this)(e->args[0])});
      case Kind::Sin: return compose(sin(probe(0)), {(*this)(e->args[0])});
      case Kind::Cos: return compose(cos(probe(0)), {(*this)(e->args[0])});
      case Kind::Function: {
        std::vector<std::vector<Expr>> args;
        std::vector<Expr> probes;
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          args.push_back((*this)(e->args[i]));
          probes.push_back(probe(i));
        }
        return compose(with_args(e, probes), args);
      }
      default: throw NonPolynomialError("cannot expand " + std::string(kind_name(e.kind())) + " in eps");
    }
  }

 private:
  static Expr probe(std::size_t i) { return parameter("#y" + std::to_string(i)); }

  std::vector<Expr> constant(const Expr& c) const {
    std::vector<Expr> v(static_cast<std::size_t>(p_ + 1), number(0));
    v[0] = c;
    return v;
  }

  std::vector<Expr> multiply(const std::vector<Expr>& a, const std::vector<Expr>& b) const {
    std::vector<Expr> out(a.size());
    for (int k = 0; k <= p_; ++k) {
      std::vector<Expr> terms;
      for (int i = 0; i <= k; ++i) {
        if (a[i].is_number(0) || b[k - i].is_number(0)) continue;
        terms.push_back(a[i] * b[k - i]);
      }
      out[k] = normalize(sum(std::move(terms)));
    }
    return out;
  }

  // g(a_0 + d_0, ..., a_n + d_n) = sum over alpha of d^alpha g(a) / alpha! * d^alpha
  std::vector<Expr> compose(const Expr& g, const std::vector<std::vector<Expr>>& args) const {
    const std::size_t n = args.size();
    Bindings at_base;
    std::vector<std::vector<Expr>> delta;
    for (std::size_t i = 0; i < n; ++i) {
      at_base.emplace(probe(i), args[i][0]);
      auto d = args[i];
      d[0] = number(0);
      delta.push_back(std::move(d));
    }
    std::vector<Expr> out = constant(number(0));
    std::vector<Expr> unit = constant(number(1));
    const bool formal = g.kind() == Kind::Function && !is_builtin_function(g->name);
    // index sequences i_1 <= i_2 <= ... enumerate each alpha once; `run` counts
    // the trailing copies of `last`, so appending `last` again divides by run + 1
    auto walk = [&](auto&& self, std::size_t last, int run, int used, const Expr& derivative,
                    const Rational& weight, const std::vector<Expr>& power) -> void {
      Expr c = normalize(product({number(weight), substitute(derivative, at_base)}));
      for (int k = 0; k <= p_; ++k) {
        if (!power[k].is_number(0)) out[k] = normalize(out[k] + c * power[k]);
      }
      if (used == p_) return;
      for (std::size_t i = used == 0 ? 0 : last; i < n; ++i) {
        if (std::all_of(delta[i].begin(), delta[i].end(), [](const Expr& d) { return d.is_number(0); })) continue;
        Expr next = formal ? function_partial(derivative, i) : diff(derivative, probe(i));
        int r = (used > 0 && i == last) ? run + 1 : 1;
        self(self, i, r, used + 1, next, Rational(weight / r), multiply(power, delta[i]));
      }
    };
    walk(walk, 0, 0, 0, g, Rational(1), unit);
    return out;
  }

  Expr eps_;
  int p_;
};

}  // namespace

std::vector<Expr> expand_orders(const PerturbationContext& ctx, const Expr& e) {
  Expr replaced = normalize(replace_dependents(ctx, e));
  try {
    return series_coefficients(replaced, ctx.eps, ctx.order);
  } catch (const NonPolynomialError&) {
    return SeriesBuilder(ctx.eps, ctx.order)(replaced);
  }
}

Expr expand_dependent(const PerturbationContext& ctx, const Expr& e) {
  return series_sum(expand_orders(ctx, e), ctx.eps);
}

Expr recursion_R(const PerturbationContext& ctx, const Expr& e) {
  (void)ctx;
  Derivation d;
  d.atom = [](const Expr& a) -> std::optional<Expr> {
    switch (a.kind()) {
      case Kind::Jet:
        if (a->index < 0) {
          throw PerturbationError("R applies to expansion coefficients, found unexpanded " + a->name);
        }
        return product({number(a->index + 1), jet(a->name, a->wrt, a->index + 1)});
      case Kind::Function:
        // builtins only need the chain rule
        if (is_builtin_function(a->name)) return std::nullopt;
        for (const auto& arg : a->args) {
          for (const auto& j : jets_in(arg)) {
            if (j->index != 0 || !j->wrt.empty()) {
              throw PerturbationError("R is undefined for " + a->name +
                                      " with arguments beyond x and zeroth-order coefficients");
            }
          }
        }
        return std::nullopt;
      default: return Expr();
    }
  };
  d.function_extra = [](const Expr& f) -> Expr {
    if (f->index < 0) return Expr();
    return function(f->name, f->args, f->partials, f->index + 1);
  };
  return derive(e, d);
}

Expr ApproxGenerator::xi_series(std::size_t i) const {
  std::vector<Expr> per_order;
  for (const auto& k : xi) per_order.push_back(k.at(i));
  return series_sum(per_order, ctx.eps);
}

Expr ApproxGenerator::eta_series(std::size_t a) const {
  std::vector<Expr> per_order;
  for (const auto& k : eta) per_order.push_back(k.at(a));
  return series_sum(per_order, ctx.eps);
}

Generator ApproxGenerator::as_series_generator() const {
  Generator g{ctx.independents, ctx.dependents, {}, {}};
  for (std::size_t i = 0; i < ctx.independents.size(); ++i) g.xi.push_back(xi_series(i));
  for (std::size_t a = 0; a < ctx.dependents.size(); ++a) g.eta.push_back(eta_series(a));
  return g;
}

ApproxGenerator ApproxGenerator::truncated(int p) const {
  ApproxGenerator g = *this;
  g.ctx.order = p;
  auto size = static_cast<std::size_t>(p + 1);
  for (auto* v : {&g.xi_seed, &g.eta_seed, &g.xi, &g.eta}) {
    if (v->size() > size) v->resize(size);
  }
  return g;
}

ApproxGenerator build_approx_generator(const PerturbationContext& ctx,
                                       std::vector<std::vector<Expr>> xi_seed,
                                       std::vector<std::vector<Expr>> eta_seed) {
  const std::size_t n = ctx.independents.size();
  const std::size_t m = ctx.dependents.size();
  const auto orders = static_cast<std::size_t>(ctx.order + 1);
  xi_seed.resize(orders, std::vector<Expr>(n));
  eta_seed.resize(orders, std::vector<Expr>(m));
  for (auto& k : xi_seed) k.resize(n);
  for (auto& k : eta_seed) k.resize(m);

  std::vector<Expr> formals;
  for (const auto& x : ctx.independents) formals.push_back(variable(x));
  for (const auto& u : ctx.dependents) formals.push_back(ctx.coefficient(u, 0));

  for (std::size_t k = 0; k < orders; ++k) {
    for (const auto* seeds : {&xi_seed[k], &eta_seed[k]}) {
      for (const auto& s : *seeds) {
        for (const auto& j : jets_in(s)) {
          if (j->index != 0 || !j->wrt.empty()) {
            throw PerturbationError("generator seeds may depend on x and u[0] only");
          }
        }
      }
    }
  }

  // Tilded components of an abstract family Phi_(k)(x, u_(0)), then the
  // seeds are substituted for every Phi_(k) and its u_(0)-derivatives.
  auto tilded = [&](const std::string& family, const std::vector<Expr>& seeds_per_order) {
    std::vector<Expr> out;
    Expr current = function(family, formals, {}, 0);
    for (std::size_t k = 0; k < orders; ++k) {
      if (k > 0) current = normalize(recursion_R(ctx, current) / Expr(static_cast<int>(k)));
      out.push_back(current);
    }
    for (auto& value : out) {
      for (std::size_t j = 0; j < orders; ++j) {
        FunctionDefinition def{family, static_cast<int>(j), formals, seeds_per_order[j]};
        value = substitute_function(value, def);
      }
    }
    return out;
  };

  ApproxGenerator g;
  g.ctx = ctx;
  g.xi_seed = xi_seed;
  g.eta_seed = eta_seed;
  g.xi.assign(orders, std::vector<Expr>(n));
  g.eta.assign(orders, std::vector<Expr>(m));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> seeds;
    for (std::size_t k = 0; k < orders; ++k) seeds.push_back(xi_seed[k][i]);
    auto values = tilded("xi$" + ctx.independents[i], seeds);
    for (std::size_t k = 0; k < orders; ++k) g.xi[k][i] = values[k];
  }
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<Expr> seeds;
    for (std::size_t k = 0; k < orders; ++k) seeds.push_back(eta_seed[k][a]);
    auto values = tilded("eta$" + ctx.dependents[a], seeds);
    for (std::size_t k = 0; k < orders; ++k) g.eta[k][a] = values[k];
  }
  return g;
}

Prolongation prolong_approx(const ApproxGenerator& g, int r) {
  const auto& ctx = g.ctx;
  std::vector<Expr> xi;
  for (std::size_t i = 0; i < ctx.independents.size(); ++i) xi.push_back(g.xi_series(i));
  auto truncate = [&](const Expr& e) { return truncate_series(e, ctx.eps, ctx.order); };
  Prolongation out;
  for (std::size_t a = 0; a < ctx.dependents.size(); ++a) {
    const std::string& dep = ctx.dependents[a];
    auto coordinate = [&](const MultiIndex& s) { return ctx.series(dep, s); };
    for (auto& [s, value] :
         prolong_component(ctx.independents, xi, g.eta_series(a), r, coordinate, truncate)) {
      out.emplace(JetCoordinate{dep, s, -1}.to_expr(ctx.independents), value);
    }
  }
  return out;
}

}  // namespace approxsym
