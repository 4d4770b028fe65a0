#include "approxsym/symmetry.hpp"

#include <algorithm>
#include <set>

#include "approxsym/normalize.hpp"
#include "approxsym/render.hpp"
#include "approxsym/series.hpp"

namespace approxsym {

// ---- constraints ------------------------------------------------------------

namespace {

int derivative_count(const Expr& f) {
  int n = 0;
  for (int p : f->partials) n += p;
  return n;
}

Bindings compose(const Bindings& current, const Expr& target, const Expr& value) {
  Bindings out;
  Bindings single{{target, value}};
  for (const auto& [k, v] : current) out.emplace(k, substitute(v, single));
  out.emplace(target, value);
  return out;
}

FunctionRule function_rule(const ModelSpec& model, const Constraint& c, const Expr& e) {
  std::vector<Expr> atoms;
  for (const auto& f : functions_in(e)) {
    if (!is_builtin_function(f->name)) atoms.push_back(f);
  }
  if (atoms.empty()) throw SymmetryError("constraint " + c.name + " mentions no unknown function");
  // highest derivative; ties broken by the canonical order
  std::stable_sort(atoms.begin(), atoms.end(), [](const Expr& a, const Expr& b) {
    return derivative_count(a) < derivative_count(b);
  });
  Expr lead = atoms.back();
  auto rhs = solve_linear(e, lead);
  if (!rhs) {
    throw SymmetryError("constraint " + c.name + " cannot be solved for " + render(lead) +
                        " (vanishing or non-constant leading coefficient)");
  }
  const FunctionSignature* sig = model.symbols.function(lead->name);
  FunctionRule rule{c.name, lead, *rhs, {}};
  if (!sig || sig->args.size() != lead->args.size()) {
    throw SymmetryError("constraint " + c.name + ": unknown function " + lead->name);
  }
  for (std::size_t i = 0; i < sig->args.size(); ++i) {
    Expr formal = model.symbols.lookup(sig->args[i]) == SymbolKind::Dependent
                      ? jet(sig->args[i], {}, model.approximate() ? 0 : -1)
                      : variable(sig->args[i]);
    if (lead->args[i] != formal) {
      throw SymmetryError("constraint " + c.name + " must be written on " + lead->name +
                          " applied to its declared arguments");
    }
    rule.formals.push_back(formal);
  }
  return rule;
}

bool dominates(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
  }
  return true;
}

}  // namespace

ConstraintSet resolve_constraints(const ModelSpec& model, const std::vector<std::string>& names,
                                  const Bindings& fixed) {
  ConstraintSet cs;
  for (const auto& [k, v] : fixed) cs.parameters.emplace(normalize(k), normalize(v));
  std::vector<const Constraint*> on_functions;
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) continue;
    const Constraint* c = model.find_constraint(name);
    if (!c) throw SymmetryError("unknown constraint " + name);
    if (c->on_functions) {
      on_functions.push_back(c);
      continue;
    }
    Expr e = substitute(c->expr, cs.parameters);
    Expr target = parameter(c->solve_for);
    if (cs.parameters.count(target)) {
      if (is_zero(e)) {
        cs.applied.push_back(name);
      } else if (e.is_number()) {
        cs.notes.push_back("constraint " + name + " is violated by the fixed values; skipped");
      } else {
        cs.notes.push_back("constraint " + name + " not applied: " + c->solve_for +
                           " is already fixed");
      }
      continue;
    }
    auto value = solve_linear(e, target);
    if (!value) {
      cs.notes.push_back("constraint " + name + " cannot be solved for " + c->solve_for +
                         " after substitution; skipped");
      continue;
    }
    cs.parameters = compose(cs.parameters, target, *value);
    cs.applied.push_back(name);
  }
  for (const Constraint* c : on_functions) {
    Expr e = substitute(c->expr, cs.parameters);
    cs.functions.push_back(function_rule(model, *c, e));
    cs.applied.push_back(c->name);
  }
  return cs;
}

Expr apply_function_rules(const Expr& input, const std::vector<FunctionRule>& rules) {
  if (rules.empty()) return normalize(input);
  Expr e = normalize(input);
  std::map<std::pair<std::size_t, std::vector<int>>, Expr> cache;
  for (int round = 0; round < 64; ++round) {
    Bindings b;
    for (const auto& atom : functions_in(e)) {
      for (std::size_t r = 0; r < rules.size(); ++r) {
        const FunctionRule& rule = rules[r];
        if (atom->name != rule.lead->name || atom->index != rule.lead->index ||
            !dominates(atom->partials, rule.lead->partials)) {
          continue;
        }
        std::vector<int> extra(atom->partials.size());
        for (std::size_t i = 0; i < extra.size(); ++i) extra[i] = atom->partials[i] - rule.lead->partials[i];
        auto key = std::make_pair(r, extra);
        auto it = cache.find(key);
        if (it == cache.end()) {
          Expr body = rule.rhs;
          for (std::size_t i = 0; i < extra.size(); ++i) {
            for (int n = 0; n < extra[i]; ++n) body = diff(body, rule.formals[i]);
          }
          it = cache.emplace(key, body).first;
        }
        Bindings actual;
        for (std::size_t i = 0; i < rule.formals.size(); ++i) {
          if (rule.formals[i] != atom->args[i]) actual.emplace(rule.formals[i], atom->args[i]);
        }
        b.emplace(atom, actual.empty() ? it->second : replace(it->second, actual));
        break;
      }
    }
    if (b.empty()) return e;
    e = substitute(e, b);
  }
  throw SymmetryError("function constraints do not terminate");
}

Expr apply_constraints(const Expr& e, const ConstraintSet& c) {
  return apply_function_rules(substitute(e, c.parameters), c.functions);
}

std::vector<DefinitionCheck> check_definition(const ModelSpec& model, const DefinitionSpec& def,
                                              const Bindings& fixed) {
  std::vector<std::string> relations;
  std::vector<const Constraint*> odes;
  for (const auto& name : def.given) {
    const Constraint* c = model.find_constraint(name);
    if (!c) throw SymmetryError("unknown constraint " + name);
    if (c->on_functions) {
      odes.push_back(c);
    } else {
      relations.push_back(name);
    }
  }
  ConstraintSet cs = resolve_constraints(model, relations, fixed);
  std::vector<DefinitionCheck> out;
  for (const Constraint* c : odes) {
    Expr e = substitute_function(substitute(c->expr, cs.parameters), def.definition);
    out.push_back({c->name, together(substitute(e, cs.parameters)).numerator});
  }
  return out;
}

// ---- problems ---------------------------------------------------------------

namespace {

Expr prepare(const Expr& e, const ModelSpec& model, const ProblemOptions& opts,
             const ConstraintSet& cs) {
  Expr out = e;
  for (const auto& name : opts.use) {
    const DefinitionSpec* d = model.find_definition(name);
    if (!d) throw SymmetryError("unknown definition " + name);
    out = substitute_function(out, d->definition);
  }
  return substitute(out, cs.parameters);
}

Problem base_problem(const ModelSpec& model, std::vector<std::string> constraint_names,
                     const ProblemOptions& opts) {
  Problem p;
  p.model_name = model.name;
  p.independents = model.symbols.independents();
  p.dependents = model.symbols.dependents();
  constraint_names.insert(constraint_names.end(), opts.extra_constraints.begin(),
                          opts.extra_constraints.end());
  for (const auto& name : opts.use) {
    const DefinitionSpec* d = model.find_definition(name);
    if (!d) throw SymmetryError("unknown definition " + name);
    // parameter relations a closed form relies on come along with it
    for (const auto& g : d->given) {
      const Constraint* c = model.find_constraint(g);
      if (c && !c->on_functions) constraint_names.push_back(g);
    }
  }
  p.constraints = resolve_constraints(model, constraint_names, opts.fixed);
  for (const auto& eq : model.equations) p.equations.push_back(prepare(eq.expr, model, opts, p.constraints));
  p.r = model.differential_order();
  p.approximate = model.approximate();
  if (p.approximate) {
    p.ctx.eps = model.symbols.small_symbol();
    p.ctx.order = opts.order.value_or(model.order);
    p.ctx.independents = p.independents;
    p.ctx.dependents = p.dependents;
  }
  return p;
}

}  // namespace

Problem make_problem(const ModelSpec& model, const GeneratorSpec& gen, const ProblemOptions& opts) {
  Problem p = base_problem(model, gen.given, opts);
  p.generator_name = gen.name;
  auto component = [&](const std::map<std::string, Expr>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? Expr() : prepare(it->second, model, opts, p.constraints);
  };
  if (!p.approximate) {
    p.exact = Generator{p.independents, p.dependents, {}, {}};
    for (const auto& x : p.independents) p.exact.xi.push_back(component(gen.orders[0].xi, x));
    for (const auto& u : p.dependents) p.exact.eta.push_back(component(gen.orders[0].eta, u));
    return p;
  }
  std::vector<std::vector<Expr>> xi_seed;
  std::vector<std::vector<Expr>> eta_seed;
  for (std::size_t k = 0; k < gen.orders.size() && static_cast<int>(k) <= p.ctx.order; ++k) {
    xi_seed.emplace_back();
    eta_seed.emplace_back();
    for (const auto& x : p.independents) xi_seed.back().push_back(component(gen.orders[k].xi, x));
    for (const auto& u : p.dependents) eta_seed.back().push_back(component(gen.orders[k].eta, u));
  }
  p.approx = build_approx_generator(p.ctx, xi_seed, eta_seed);
  p.exact = p.approx.as_series_generator();
  return p;
}

Problem make_solution_problem(const ModelSpec& model, const SolutionSpec& sol,
                              const ProblemOptions& opts) {
  Problem p = base_problem(model, sol.given, opts);
  p.generator_name = "";
  return p;
}

// ---- manifold ----------------------------------------------------------------

const Rule* Manifold::rule_for(const Expr& lead) const {
  for (const auto& r : rules) {
    if (r.lead == lead) return &r;
  }
  return nullptr;
}

long count_selections(int m, int q) {
  if (q < 0 || q > m) return 0;
  long c = 1;
  for (int i = 1; i <= q; ++i) c = c * (m - q + i) / i;
  return c;
}

namespace {

Bindings lead_bindings(const std::vector<Rule>& rules) {
  Bindings b;
  for (const auto& r : rules) b.emplace(r.lead, r.rhs);
  return b;
}

bool mentions_lead(const Expr& e, const Bindings& leads) {
  for (const auto& j : jets_in(e)) {
    if (leads.count(j)) return true;
  }
  return false;
}

void close_rules(std::vector<Rule>& rules, int max_rounds) {
  for (const auto& r : rules) {
    for (const auto& j : jets_in(r.rhs)) {
      if (j == r.lead) throw SymmetryError("rule for " + render(r.lead) + " is circular");
    }
  }
  for (int round = 0; round < max_rounds; ++round) {
    Bindings leads = lead_bindings(rules);
    bool changed = false;
    for (auto& r : rules) {
      if (!mentions_lead(r.rhs, leads)) continue;
      r.rhs = substitute(r.rhs, leads);
      changed = true;
      for (const auto& j : jets_in(r.rhs)) {
        if (j == r.lead) throw SymmetryError("rule for " + render(r.lead) + " is circular");
      }
    }
    if (!changed) return;
  }
  throw SymmetryError("manifold rules do not close within the iteration cap");
}

// Highest-order jet among `candidates` that `e` can be solved for.
std::optional<Rule> solve_for_leading(const Expr& e, std::vector<Expr> candidates,
                                      const std::vector<Rule>& existing, std::string origin) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const Expr& a, const Expr& b) {
    return jet_order(a) > jet_order(b);
  });
  for (std::size_t i = 0; i < candidates.size();) {
    std::size_t j = i;
    while (j < candidates.size() && jet_order(candidates[j]) == jet_order(candidates[i])) ++j;
    for (std::size_t k = j; k-- > i;) {
      const Expr& c = candidates[k];
      bool taken = std::any_of(existing.begin(), existing.end(),
                               [&](const Rule& r) { return r.lead == c; });
      if (taken) continue;
      if (auto rhs = solve_linear(e, c)) return Rule{c, *rhs, origin};
    }
    i = j;
  }
  return std::nullopt;
}

std::string order_label(int k) { return "eps^" + std::to_string(k); }

}  // namespace

Manifold build_manifold(const Problem& problem, const ManifoldOptions& opts) {
  Manifold m;
  m.q = opts.q;
  const auto& deps = problem.dependents;
  const auto& indeps = problem.independents;
  const std::size_t n = indeps.size();
  if (opts.q < 0 || opts.q > static_cast<int>(deps.size())) {
    throw SymmetryError("q must lie between 0 and the number of dependent variables");
  }
  if (!opts.selection.empty()) {
    if (static_cast<int>(opts.selection.size()) != opts.q) {
      throw SymmetryError("selection must name exactly q dependent variables");
    }
    for (const auto& s : opts.selection) {
      if (std::find(deps.begin(), deps.end(), s) == deps.end()) {
        throw SymmetryError("selection names unknown dependent variable " + s);
      }
      if (std::count(opts.selection.begin(), opts.selection.end(), s) > 1) {
        throw SymmetryError("selection repeats " + s);
      }
    }
    // keep declaration order
    for (const auto& d : deps) {
      if (std::find(opts.selection.begin(), opts.selection.end(), d) != opts.selection.end()) {
        m.selection.push_back(d);
      }
    }
  } else {
    m.selection.assign(deps.begin(), deps.begin() + opts.q);
  }

  const std::vector<Expr>& xi0 = problem.approximate ? problem.approx.xi.at(0) : problem.exact.xi;
  if (opts.q > 0) {
    if (opts.normalization) {
      if (*opts.normalization < 0 || *opts.normalization >= static_cast<int>(n)) {
        throw SymmetryError("normalization index out of range");
      }
      m.normalization = *opts.normalization;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_zero(xi0[i])) {
          m.normalization = static_cast<int>(i);
          break;
        }
      }
    }
    if (m.normalization < 0 || is_zero(xi0[static_cast<std::size_t>(m.normalization)])) {
      throw SymmetryError("no non-vanishing xi to normalize the invariant surface condition");
    }
  }
  const auto star = static_cast<std::size_t>(std::max(m.normalization, 0));

  std::vector<MultiIndex> shifts{MultiIndex(n, 0)};
  for (const auto& s : multi_indices(n, problem.r - 1)) shifts.push_back(s);

  // invariant surface conditions and their consequences
  for (const auto& dep : m.selection) {
    std::size_t a = static_cast<std::size_t>(std::find(deps.begin(), deps.end(), dep) - deps.begin());
    std::vector<Expr> per_order;
    if (problem.approximate) {
      const auto& ctx = problem.ctx;
      std::vector<Expr> terms{-problem.approx.eta_series(a)};
      for (std::size_t i = 0; i < n; ++i) {
        MultiIndex e_i(n, 0);
        e_i[i] = 1;
        terms.push_back(problem.approx.xi_series(i) * ctx.series(dep, e_i));
      }
      per_order = series_coefficients(normalize(sum(terms)), ctx.eps, ctx.order);
    } else {
      std::vector<Expr> terms{-problem.exact.eta[a]};
      for (std::size_t i = 0; i < n; ++i) terms.push_back(problem.exact.xi[i] * jet(dep, {indeps[i]}));
      per_order.push_back(normalize(sum(terms)));
    }
    for (std::size_t k = 0; k < per_order.size(); ++k) {
      std::map<MultiIndex, Expr> consequences;
      consequences.emplace(MultiIndex(n, 0), per_order[k]);
      for (const auto& s : shifts) {
        if (total_order(s) == 0) continue;
        std::size_t i = n;
        while (i > 0 && s[i - 1] == 0) --i;
        --i;
        MultiIndex prev = s;
        --prev[i];
        consequences.emplace(s, total_derivative(consequences.at(prev), indeps[i]));
      }
      for (const auto& s : shifts) {
        MultiIndex target = s;
        ++target[star];
        int expansion = problem.approximate ? static_cast<int>(k) : -1;
        Expr lead = JetCoordinate{dep, target, expansion}.to_expr(indeps);
        auto rhs = solve_linear(consequences.at(s), lead);
        if (!rhs) {
          throw SymmetryError("invariant surface condition cannot be solved for " + render(lead));
        }
        std::string origin = total_order(s) == 0 ? "Q[" + dep + "]" : "D(Q[" + dep + "]";
        if (total_order(s) > 0) {
          for (std::size_t v = 0; v < n; ++v) {
            for (int c = 0; c < s[v]; ++c) origin += "," + indeps[v];
          }
          origin += ")";
        }
        if (problem.approximate) origin += " " + order_label(static_cast<int>(k));
        m.rules.push_back(Rule{lead, *rhs, origin, problem.approximate ? static_cast<int>(k) : -1});
      }
    }
  }
  close_rules(m.rules, opts.max_rounds);

  // the equations, solved for their highest remaining derivative
  for (std::size_t e = 0; e < problem.equations.size(); ++e) {
    std::vector<Expr> per_order = problem.approximate
                                      ? expand_orders(problem.ctx, problem.equations[e])
                                      : std::vector<Expr>{problem.equations[e]};
    for (std::size_t k = 0; k < per_order.size(); ++k) {
      Expr reduced = reduce_modulo(per_order[k], m);
      if (reduced.is_number(0)) continue;
      std::vector<Expr> own;
      std::vector<Expr> any;
      for (const auto& j : jets_in(reduced)) {
        if (j->wrt.empty()) continue;
        any.push_back(j);
        if (!problem.approximate || j->index == static_cast<int>(k)) own.push_back(j);
      }
      std::string origin = "eq " + std::to_string(e + 1);
      if (problem.approximate) origin += " " + order_label(static_cast<int>(k));
      auto rule = solve_for_leading(reduced, own, m.rules, origin);
      if (!rule) rule = solve_for_leading(reduced, any, m.rules, origin);
      if (!rule) throw SymmetryError("no leading derivative to solve " + origin + " for");
      rule->eps_order = problem.approximate ? static_cast<int>(k) : -1;
      m.rules.push_back(*rule);
      close_rules(m.rules, opts.max_rounds);
    }
  }
  return m;
}

Expr reduce_modulo(const Expr& input, const Manifold& m) {
  Bindings leads = lead_bindings(m.rules);
  Expr e = normalize(input);
  for (int round = 0; round < 64; ++round) {
    if (!mentions_lead(e, leads)) return e;
    e = substitute(e, leads);
  }
  throw SymmetryError("reduction modulo the manifold does not terminate");
}

// ---- invariance ---------------------------------------------------------------

namespace {
Expr cleared(const Expr& e, const Problem& problem) {
  Expr with_rules = apply_function_rules(e, problem.constraints.functions);
  return together(with_rules).numerator;
}
}  // namespace

std::vector<OrderResidual> invariance_residual(const Problem& problem, const Manifold& m) {
  std::vector<OrderResidual> out;
  if (!problem.approximate) {
    Prolongation pro = prolong(problem.exact, problem.r);
    for (const auto& eq : problem.equations) {
      Expr r = apply_generator(problem.exact, pro, eq);
      out.push_back({0, cleared(reduce_modulo(r, m), problem)});
    }
    return out;
  }
  Prolongation pro = prolong_approx(problem.approx, problem.r);
  Generator series = problem.approx.as_series_generator();
  for (const auto& eq : problem.equations) {
    Expr r = apply_generator(series, pro, eq);
    auto orders = expand_orders(problem.ctx, r);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      out.push_back({static_cast<int>(k), cleared(reduce_modulo(orders[k], m), problem)});
    }
  }
  return out;
}

bool all_zero(const std::vector<OrderResidual>& residuals) {
  return std::all_of(residuals.begin(), residuals.end(),
                     [](const OrderResidual& r) { return r.residual.is_number(0); });
}

// ---- determining systems -------------------------------------------------------

Expr make_primitive(const Expr& e) {
  Poly p = to_poly(e);
  if (p.empty()) return Expr();
  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& [mono, c] : p) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  Rational content(g, l);
  content.canonicalize();
  if (p.begin()->second < 0) content = -content;

  std::vector<Factor> common;
  for (const auto& f : p.begin()->first.factors) {
    // generic nonzero symbols only; unknown functions are what is solved for
    if (f.base.kind() == Kind::Parameter || f.base.kind() == Kind::Variable) common.push_back(f);
  }
  Expr shared_exp = p.begin()->first.exp_arg;
  for (const auto& [mono, c] : p) {
    std::vector<Factor> next;
    for (const auto& f : common) {
      for (const auto& g2 : mono.factors) {
        if (g2.base == f.base) next.push_back(Factor{f.base, std::min(f.exponent, g2.exponent)});
      }
    }
    common = std::move(next);
    if (mono.exp_arg != shared_exp) shared_exp = Expr();
  }
  Poly out;
  for (const auto& [mono, c] : p) {
    Monomial m2;
    m2.degree = 0;
    for (const auto& f : mono.factors) {
      Rational ex = f.exponent;
      for (const auto& cf : common) {
        if (cf.base == f.base) ex -= cf.exponent;
      }
      if (ex != 0) {
        m2.factors.push_back(Factor{f.base, ex});
        m2.degree += ex;
      }
    }
    m2.exp_arg = shared_exp.is_number(0) ? mono.exp_arg : Expr();
    out.emplace(std::move(m2), c / content);
  }
  Expr result = to_expr(out);
  // re-sorting can change which term leads
  Poly check = to_poly(result);
  if (!check.empty() && check.begin()->second < 0) result = normalize(-result);
  return result;
}

namespace {

// Jets that occur only as plain polynomial factors (never inside a kernel).
bool only_as_factor(const Expr& residual, const Expr& j) {
  for (const auto& [mono, c] : to_poly(residual)) {
    for (const auto& f : mono.factors) {
      if (f.base == j) continue;
      if (contains(f.base, j)) return false;
    }
    if (contains(mono.exp_arg, j)) return false;
  }
  return true;
}

}  // namespace

DeterminingSystem determining_system(const Problem& problem, const Manifold& m) {
  DeterminingSystem sys;
  sys.normalization = m.normalization;
  sys.residuals = invariance_residual(problem, m);
  for (const auto& r : sys.residuals) {
    std::vector<Expr> vars;
    for (const auto& j : jets_in(r.residual)) {
      if (!j->wrt.empty() || only_as_factor(r.residual, j)) vars.push_back(j);
    }
    std::vector<MonomialTerm> parts;
    try {
      parts = collect_by_monomials(r.residual, vars);
    } catch (const NonPolynomialError& e) {
      throw SymmetryError(std::string("residual is not polynomial in the jet coordinates: ") + e.what());
    }
    for (const auto& part : parts) {
      sys.equations.push_back({r.order, part.monomial, part.coefficient, make_primitive(part.coefficient)});
    }
  }
  return sys;
}

bool resums(const DeterminingSystem& system) {
  for (const auto& r : system.residuals) {
    std::vector<Expr> terms{-r.residual};
    for (const auto& e : system.equations) {
      if (e.order == r.order) terms.push_back(e.monomial * e.coefficient);
    }
    if (!normalize(sum(std::move(terms))).is_number(0)) return false;
  }
  return true;
}

// ---- solutions -------------------------------------------------------------------

std::vector<OrderResidual> verify_solution(const Problem& problem,
                                           const std::map<std::string, Expr>& raw_values) {
  std::map<std::string, Expr> values;
  for (const auto& [dep, v] : raw_values) values[dep] = apply_constraints(v, problem.constraints);
  std::vector<OrderResidual> out;
  for (const auto& eq : problem.equations) {
    Bindings b;
    std::map<std::vector<std::string>, Expr> derivatives;
    for (const auto& j : jets_in(eq)) {
      auto it = values.find(j->name);
      if (it == values.end()) throw SymmetryError("no value given for " + j->name);
      Expr d = it->second;
      for (const auto& w : j->wrt) d = diff(d, variable(w));
      b.emplace(j, d);
    }
    Expr r = substitute(eq, b);
    if (!problem.approximate) {
      out.push_back({0, cleared(r, problem)});
      continue;
    }
    std::vector<Expr> orders;
    try {
      orders = series_coefficients(r, problem.ctx.eps, problem.ctx.order);
    } catch (const NonPolynomialError& e) {
      throw SymmetryError(std::string("solution is not polynomial in the small parameter: ") + e.what());
    }
    for (std::size_t k = 0; k < orders.size(); ++k) {
      out.push_back({static_cast<int>(k), cleared(orders[k], problem)});
    }
  }
  return out;
}

namespace {

// Groups the terms of e by the part that depends on the independent variables.
std::vector<Expr> split_by_kernels(const Expr& e, const std::vector<std::string>& independents) {
  auto depends = [&](const Expr& x) {
    return std::any_of(independents.begin(), independents.end(),
                       [&](const std::string& v) { return mentions(x, v); });
  };
  std::map<Monomial, std::vector<Expr>, MonomialLess> groups;
  for (const auto& [mono, c] : to_poly(e)) {
    Monomial key;
    key.degree = 0;
    std::vector<Expr> rest{number(c)};
    for (const auto& f : mono.factors) {
      if (depends(f.base)) {
        key.factors.push_back(f);
        key.degree += f.exponent;
      } else {
        rest.push_back(pow(f.base, f.exponent));
      }
    }
    std::vector<Expr> key_arg;
    std::vector<Expr> rest_arg;
    for (const auto& t : terms_of(mono.exp_arg)) (depends(t) ? key_arg : rest_arg).push_back(t);
    key.exp_arg = normalize(sum(key_arg));
    if (!rest_arg.empty()) rest.push_back(exp(sum(rest_arg)));
    groups[key].push_back(product(std::move(rest)));
  }
  std::vector<Expr> out;
  for (auto& [key, parts] : groups) {
    Expr c = normalize(sum(std::move(parts)));
    if (!c.is_number(0)) out.push_back(c);
  }
  return out;
}

}  // namespace

AnsatzResult solve_ansatz(const Problem& problem, const SolutionSpec& ansatz) {
  AnsatzResult result;
  std::vector<Expr> unknowns;
  for (const auto& u : ansatz.unknowns) unknowns.push_back(parameter(u));
  const std::size_t nu = unknowns.size();

  // rows: coefficients of each unknown, then the free term
  std::vector<std::vector<Expr>> rows;
  for (const auto& r : verify_solution(problem, ansatz.values)) {
    for (const auto& c : split_by_kernels(r.residual, problem.independents)) {
      std::vector<Expr> row(nu + 1);
      std::vector<MonomialTerm> parts;
      try {
        parts = collect_by_monomials(c, unknowns);
      } catch (const NonPolynomialError&) {
        throw SymmetryError("ansatz conditions are not linear in the unknowns");
      }
      for (const auto& part : parts) {
        if (part.monomial.is_number(1)) {
          row[nu] = part.coefficient;
          continue;
        }
        auto it = std::find(unknowns.begin(), unknowns.end(), part.monomial);
        if (it == unknowns.end()) throw SymmetryError("ansatz conditions are not linear in the unknowns");
        row[static_cast<std::size_t>(it - unknowns.begin())] = part.coefficient;
      }
      result.conditions.push_back(c);
      rows.push_back(std::move(row));
    }
  }

  // fraction-free elimination
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < nu && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && is_zero(rows[piv][col])) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || is_zero(rows[i][col])) continue;
      Expr a = rows[rank][col];
      Expr b = rows[i][col];
      for (std::size_t k = 0; k <= nu; ++k) {
        rows[i][k] = together(normalize(a * rows[i][k] - b * rows[rank][k])).numerator;
      }
    }
    pivot_col.push_back(static_cast<int>(col));
    ++rank;
  }
  result.consistent = true;
  for (std::size_t i = rank; i < rows.size(); ++i) {
    if (!is_zero(rows[i][nu])) result.consistent = false;
  }
  for (std::size_t col = 0; col < nu; ++col) {
    if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<int>(col)) == pivot_col.end()) {
      result.free.push_back(ansatz.unknowns[col]);
    }
  }
  if (!result.consistent) return result;
  // each pivot row is now a*x_col + (free unknowns) + b = 0
  for (std::size_t i = 0; i < rank; ++i) {
    auto col = static_cast<std::size_t>(pivot_col[i]);
    std::vector<Expr> rest{rows[i][nu]};
    for (std::size_t k = 0; k < nu; ++k) {
      if (k != col) rest.push_back(rows[i][k] * unknowns[k]);
    }
    result.values.emplace(unknowns[col], normalize(-sum(std::move(rest)) / rows[i][col]));
  }
  std::map<std::string, Expr> solved;
  for (const auto& [dep, v] : ansatz.values) solved[dep] = substitute(v, result.values);
  result.residual_after = verify_solution(problem, solved);
  return result;
}

}  // namespace approxsym
