// approxsym command-line driver: parse, verify, determining, scan, render.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "approxsym/casestudy.hpp"
#include "approxsym/normalize.hpp"
#include "approxsym/numeric.hpp"
#include "approxsym/parser.hpp"
#include "approxsym/perturb.hpp"
#include "approxsym/render.hpp"
#include "approxsym/series.hpp"
#include "approxsym/symmetry.hpp"

namespace {

using namespace approxsym;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

// Bad input of any kind: unknown names, malformed values, unparsable models.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string model_path;
  std::vector<std::string> sets;
  std::vector<std::string> constraints;
  std::vector<std::string> use;
  std::string format = "plain";
  std::string out;
  bool stamp = false;
};

Format output_format(const Common& c) { return c.format == "latex" ? Format::Latex : Format::Plain; }

ModelSpec load_model(const std::string& path) {
  if (path.empty()) throw UsageError("no model given (use --model FILE)");
  ParseResult r = parse_model_file(path);
  for (const Diagnostic& d : r.diagnostics) std::cerr << format_diagnostic(d) << "\n";
  if (!r.ok()) throw UsageError("could not parse " + path);
  return std::move(*r.model);
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw UsageError("expected NAME=VALUE, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

// --set values for symbolic work: any expression in the parameters.
Bindings exact_settings(const ModelSpec& model, const std::vector<std::string>& sets) {
  Bindings out;
  for (const std::string& s : sets) {
    auto [name, value] = split_assignment(s);
    if (model.symbols.lookup(name) != SymbolKind::Parameter) {
      throw UsageError("'" + name + "' is not a parameter of model " + model.name);
    }
    ExpressionResult r = parse_expression(value, model.symbols);
    for (const Diagnostic& d : r.diagnostics) std::cerr << format_diagnostic(d) << "\n";
    if (!r.expr) throw UsageError("bad value for " + name);
    if (!jets_in(*r.expr).empty() || !functions_in(*r.expr).empty()) {
      throw UsageError("value for " + name + " must not involve variables or functions");
    }
    out[parameter(name)] = normalize(*r.expr);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + c.out);
  f << text;
}

std::string stamp_line() {
  std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("stamp: ") + buf + "\n";
}

std::string residual_key(const ModelSpec& model, int order) {
  return model.approximate() ? "residual[eps^" + std::to_string(order) + "]" : "residual";
}

// ---- verify ---------------------------------------------------------------

struct VerifyOptions {
  std::vector<std::string> generators;
  std::vector<std::string> solutions;
  std::vector<std::string> definitions;
  int q = 0;
  std::string select;
  std::string normalization;
  int p = -1;
};

struct Report {
  std::string text;
  bool ok = true;
};

ProblemOptions problem_options(const ModelSpec& model, const Common& c, int p) {
  ProblemOptions o;
  o.extra_constraints = c.constraints;
  o.fixed = exact_settings(model, c.sets);
  o.use = c.use;
  if (p >= 0) o.order = p;
  for (const auto& name : c.constraints) {
    if (!model.find_constraint(name)) throw UsageError("unknown constraint '" + name + "'");
  }
  for (const auto& name : c.use) {
    if (!model.find_definition(name)) throw UsageError("unknown definition '" + name + "'");
  }
  return o;
}

ManifoldOptions manifold_options(const Problem& problem, const VerifyOptions& v) {
  ManifoldOptions m;
  m.q = v.q;
  if (v.q < 0 || v.q > static_cast<int>(problem.dependents.size())) {
    throw UsageError("q must lie between 0 and the number of dependent variables");
  }
  m.selection = split_list(v.select);
  for (const auto& s : m.selection) {
    if (std::find(problem.dependents.begin(), problem.dependents.end(), s) == problem.dependents.end()) {
      throw UsageError("'" + s + "' is not a dependent variable");
    }
  }
  if (!m.selection.empty() && static_cast<int>(m.selection.size()) != v.q) {
    throw UsageError("--select must name exactly q dependent variables");
  }
  if (!v.normalization.empty()) {
    auto it = std::find(problem.independents.begin(), problem.independents.end(), v.normalization);
    if (it == problem.independents.end()) throw UsageError("'" + v.normalization + "' is not an independent variable");
    m.normalization = static_cast<int>(it - problem.independents.begin());
  }
  return m;
}

void header(std::ostringstream& out, const ModelSpec& model, const Common& c) {
  out << "model: " << model.name << "\n";
  if (c.stamp) out << stamp_line();
}

void constraint_lines(std::ostringstream& out, const Problem& p, Format fmt) {
  out << "constraints: " << (p.constraints.applied.empty() ? "none" : join(p.constraints.applied)) << "\n";
  for (const auto& [k, v] : p.constraints.parameters) out << "set: " << render(k, fmt) << " = " << render(v, fmt) << "\n";
  for (const auto& n : p.constraints.notes) out << "note: " << n << "\n";
}

bool residual_lines(std::ostringstream& out, const ModelSpec& model, const std::vector<OrderResidual>& rs,
                    Format fmt) {
  bool ok = true;
  for (const auto& r : rs) {
    out << residual_key(model, r.order) << ": " << render(r.residual, fmt) << "\n";
    ok = ok && is_zero(r.residual);
  }
  return ok;
}

Report verify_generator(const ModelSpec& model, const std::string& name, const Common& c, const VerifyOptions& v) {
  const GeneratorSpec* gen = model.find_generator(name);
  if (!gen) throw UsageError("unknown generator '" + name + "'");
  Problem problem = make_problem(model, *gen, problem_options(model, c, v.p));
  Manifold m = build_manifold(problem, manifold_options(problem, v));
  std::vector<OrderResidual> rs = invariance_residual(problem, m);
  Format fmt = output_format(c);
  std::ostringstream out;
  header(out, model, c);
  out << "generator: " << name << "\n";
  out << "q: " << m.q << "\n";
  out << "selection: " << (m.selection.empty() ? "none" : join(m.selection)) << "\n";
  out << "normalization: "
      << (m.normalization < 0 ? "none" : "xi[" + problem.independents[m.normalization] + "] = 1") << "\n";
  out << "p: " << (problem.approximate ? problem.ctx.order : 0) << "\n";
  if (!c.use.empty()) out << "use: " << join(c.use) << "\n";
  constraint_lines(out, problem, fmt);
  bool ok = residual_lines(out, model, rs, fmt);
  out << "verdict: " << (ok ? "ok" : "FAILED") << "\n";
  return {out.str(), ok};
}

Report verify_solution_report(const ModelSpec& model, const std::string& name, const Common& c,
                              const VerifyOptions& v) {
  const SolutionSpec* sol = model.find_solution(name);
  if (!sol) throw UsageError("unknown solution '" + name + "'");
  Problem problem = make_solution_problem(model, *sol, problem_options(model, c, v.p));
  Format fmt = output_format(c);
  std::ostringstream out;
  header(out, model, c);
  out << (sol->ansatz ? "ansatz: " : "solution: ") << name << "\n";
  out << "p: " << (problem.approximate ? problem.ctx.order : 0) << "\n";
  if (!c.use.empty()) out << "use: " << join(c.use) << "\n";
  constraint_lines(out, problem, fmt);
  bool ok = true;
  if (sol->ansatz) {
    AnsatzResult a = solve_ansatz(problem, *sol);
    out << "unknowns: " << join(sol->unknowns) << "\n";
    for (const auto& cond : a.conditions) out << "condition: " << render(cond, fmt) << " = 0\n";
    for (const auto& [k, val] : a.values) out << "solved: " << render(k, fmt) << " = " << render(val, fmt) << "\n";
    out << "free: " << (a.free.empty() ? "none" : join(a.free)) << "\n";
    out << "consistent: " << (a.consistent ? "yes" : "no") << "\n";
    ok = residual_lines(out, model, a.residual_after, fmt) && a.consistent;
  } else {
    ok = residual_lines(out, model, verify_solution(problem, sol->values), fmt);
  }
  out << "verdict: " << (ok ? "ok" : "FAILED") << "\n";
  return {out.str(), ok};
}

Report verify_definition(const ModelSpec& model, const std::string& name, const Common& c) {
  const DefinitionSpec* def = model.find_definition(name);
  if (!def) throw UsageError("unknown definition '" + name + "'");
  Format fmt = output_format(c);
  std::ostringstream out;
  header(out, model, c);
  out << "definition: " << name << "\n";
  out << "given: " << (def->given.empty() ? "none" : join(def->given)) << "\n";
  bool ok = true;
  auto checks = check_definition(model, *def, exact_settings(model, c.sets));
  if (checks.empty()) out << "note: no function constraint to check\n";
  for (const auto& ch : checks) {
    out << "residual[" << ch.constraint << "]: " << render(ch.residual, fmt) << "\n";
    ok = ok && is_zero(ch.residual);
  }
  out << "verdict: " << (ok ? "ok" : "FAILED") << "\n";
  return {out.str(), ok};
}

int run_verify(const Common& c, const VerifyOptions& v) {
  ModelSpec model = load_model(c.model_path);
  std::vector<std::function<Report()>> tasks;
  for (const auto& g : v.generators) tasks.push_back([&, g] { return verify_generator(model, g, c, v); });
  for (const auto& s : v.solutions) tasks.push_back([&, s] { return verify_solution_report(model, s, c, v); });
  for (const auto& d : v.definitions) tasks.push_back([&, d] { return verify_definition(model, d, c); });
  if (tasks.empty()) throw UsageError("nothing to verify (use --gen, --sol or --def)");

  // independent checks run concurrently; output keeps the command-line order
  std::vector<Report> reports(tasks.size());
  const std::size_t width = static_cast<std::size_t>(numeric::thread_count());
  for (std::size_t begin = 0; begin < tasks.size(); begin += width) {
    std::vector<std::future<Report>> running;
    for (std::size_t i = begin; i < std::min(tasks.size(), begin + width); ++i) {
      running.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, tasks[i]));
    }
    for (std::size_t i = 0; i < running.size(); ++i) reports[begin + i] = running[i].get();
  }
  std::string text;
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) text += "\n";
    text += reports[i].text;
    ok = ok && reports[i].ok;
  }
  emit(c, text);
  return ok ? kOk : kFailed;
}

// ---- determining ------------------------------------------------------------

int run_determining(const Common& c, const VerifyOptions& v) {
  ModelSpec model = load_model(c.model_path);
  if (v.generators.size() != 1) throw UsageError("determining needs exactly one --gen");
  const GeneratorSpec* gen = model.find_generator(v.generators[0]);
  if (!gen) throw UsageError("unknown generator '" + v.generators[0] + "'");
  bool empty = true;
  for (const auto& o : gen->orders) {
    for (const auto& [k, e] : o.xi) empty = empty && is_zero(e);
    for (const auto& [k, e] : o.eta) empty = empty && is_zero(e);
  }
  if (empty) throw UsageError("generator '" + gen->name + "' has no non-zero component");
  Problem problem = make_problem(model, *gen, problem_options(model, c, v.p));
  Manifold m = build_manifold(problem, manifold_options(problem, v));
  DeterminingSystem sys = determining_system(problem, m);
  Format fmt = output_format(c);
  std::ostringstream out;
  header(out, model, c);
  out << "generator: " << gen->name << "\n";
  out << "q: " << m.q << "\n";
  out << "selection: " << (m.selection.empty() ? "none" : join(m.selection)) << "\n";
  out << "normalization: "
      << (m.normalization < 0 ? "none" : "xi[" + problem.independents[m.normalization] + "] = 1") << "\n";
  out << "p: " << (problem.approximate ? problem.ctx.order : 0) << "\n";
  constraint_lines(out, problem, fmt);
  out << "equations: " << sys.equations.size() << "\n";
  for (const auto& e : sys.equations) {
    out << (model.approximate() ? "eps^" + std::to_string(e.order) + " " : std::string()) << "["
        << render(e.monomial, fmt) << "]: " << render(e.equation, fmt) << " = 0\n";
  }
  bool ok = resums(sys);
  out << "resums: " << (ok ? "yes" : "no") << "\n";
  emit(c, out.str());
  return ok ? kOk : kInternal;
}

// ---- scan ---------------------------------------------------------------------

struct ScanOptions {
  std::string solution;
  std::string preset;
  double epsilon = 0.03;
  int halvings = 3;
  std::string t_range = "0,2";
  std::string x_range = "0,4";
  std::string points = "201,201";
  std::string surface;
  std::string dawson = "standard";
  double corrupt = 0;
  double expect_order = -1;
  double expect_below = -1;
  bool coefficients = false;
  double fd_step = 1e-3;
};

std::pair<double, double> range_pair(const std::string& text, const char* what) {
  auto parts = split_list(text);
  if (parts.size() != 2) throw UsageError(std::string("--") + what + " takes A,B");
  try {
    return {std::stod(parts[0]), std::stod(parts[1])};
  } catch (const std::exception&) {
    throw UsageError(std::string("bad numbers in --") + what);
  }
}

// Numeric --set values; `pi` may appear in them.
numeric::Env<double> numeric_settings(const ModelSpec& model, const std::vector<std::string>& sets) {
  SymbolTable symbols = model.symbols;
  symbols.declare("pi", SymbolKind::Parameter);
  numeric::Env<double> out;
  for (const std::string& s : sets) {
    auto [name, value] = split_assignment(s);
    if (model.symbols.lookup(name) != SymbolKind::Parameter) {
      throw UsageError("'" + name + "' is not a parameter of model " + model.name);
    }
    ExpressionResult r = parse_expression(value, symbols);
    for (const Diagnostic& d : r.diagnostics) std::cerr << format_diagnostic(d) << "\n";
    if (!r.expr) throw UsageError("bad value for " + name);
    try {
      out[name] = numeric::evaluate<double>(*r.expr, {{"pi", std::acos(-1.0)}});
    } catch (const numeric::EvalError& e) {
      throw UsageError("value for " + name + ": " + e.what());
    }
  }
  return out;
}

int run_scan(const Common& c, const ScanOptions& s) {
  ModelSpec model;
  std::string solution = s.solution;
  numeric::Env<double> params;
  double epsilon = s.epsilon;
  if (!s.preset.empty()) {
    const casestudy::Preset* pre = casestudy::find_preset(s.preset);
    if (!pre) throw UsageError("unknown preset '" + s.preset + "' (fig1, fig2, fig3)");
    model = c.model_path.empty() ? casestudy::rdc_hyperbolic_model() : load_model(c.model_path);
    if (solution.empty()) solution = pre->solution;
    params = pre->numeric_parameters();
    params.erase("delta");  // derived below, after any --set
    epsilon = pre->epsilon.get_d();
  } else {
    model = load_model(c.model_path);
  }
  if (solution.empty()) throw UsageError("scan needs --sol or --preset");
  const SolutionSpec* sol = model.find_solution(solution);
  if (!sol) throw UsageError("unknown solution '" + solution + "'");
  if (sol->ansatz) throw UsageError("'" + solution + "' is an ansatz; scan a solution with fixed constants");
  for (const auto& [k, val] : numeric_settings(model, c.sets)) params[k] = val;
  // the solution's own parameter relations fill in targets left unset
  for (const auto& name : sol->given) {
    const Constraint* k = model.find_constraint(name);
    if (!k || k->on_functions || params.count(k->solve_for)) continue;
    for (const auto& [target, value] : resolve_constraints(model, {name}).parameters) {
      try {
        params[target->name] = numeric::evaluate<double>(value, params);
      } catch (const numeric::EvalError&) {
        // needs a parameter that is still unset; delta below, or an error later
      }
    }
  }
  // delta is tied to the discriminant 8 beta gamma - alpha^2 in the case study
  if (model.symbols.lookup("delta") == SymbolKind::Parameter && !params.count("delta") &&
      params.count("alpha") && params.count("beta") && params.count("gamma")) {
    params["delta"] = std::sqrt(std::abs(8 * params["beta"] * params["gamma"] - params["alpha"] * params["alpha"]));
  }

  std::map<std::string, Expr> values = sol->values;
  std::string eps = model.approximate() ? *model.symbols.small() : "eps";
  if (s.corrupt != 0) {
    if (!model.approximate()) throw UsageError("--corrupt needs a model with a small parameter");
    // perturb the secular coefficient: u -> u + K eps t u|eps=0
    Expr e = parameter(eps);
    for (auto& [dep, u] : values) {
      Expr base = replace(u, {{e, number(0)}});
      u = u + number(*parse_rational(std::to_string(s.corrupt))) * e * variable(model.symbols.independents()[0]) * base;
    }
  }
  if (model.equations.size() != 1) throw UsageError("scan supports single-equation models");
  if (model.symbols.independents().size() != 2) throw UsageError("scan needs exactly two independent variables");

  numeric::ScanSpec spec;
  spec.residual = numeric::solution_residual(model.equations[0].expr, values);
  spec.eps_name = eps;
  spec.params = params;
  spec.grid.t_name = model.symbols.independents()[0];
  spec.grid.x_name = model.symbols.independents()[1];
  std::tie(spec.grid.t0, spec.grid.t1) = range_pair(s.t_range, "t");
  std::tie(spec.grid.x0, spec.grid.x1) = range_pair(s.x_range, "x");
  auto [nt, nx] = range_pair(s.points, "points");
  spec.grid.nt = static_cast<Eigen::Index>(nt);
  spec.grid.nx = static_cast<Eigen::Index>(nx);
  try {
    spec.grid.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  spec.epsilon = epsilon;
  if (s.halvings < 0) throw UsageError("--halvings must be non-negative");
  spec.halvings = s.halvings;
  if (s.dawson != "standard" && s.dawson != "printed") throw UsageError("--dawson is standard or printed");
  spec.dawson_variant = s.dawson == "printed" ? numeric::DawsonVariant::Printed : numeric::DawsonVariant::Standard;

  if (s.coefficients) {
    if (!model.approximate()) throw UsageError("--coefficients needs a model with a small parameter");
    // eps-order coefficients of the residual with finite-difference jets
    numeric::FiniteDifferenceSpec fd;
    fd.step = s.fd_step;
    std::ostringstream out;
    out << "order,max_abs_coefficient\n";
    bool ok = true;
    try {
      auto at = [&](double e) {
        numeric::Env<double> q = params;
        q[eps] = e;
        return numeric::fd_residual_grid(model.equations[0].expr, values, q, spec.grid, fd, spec.dawson_variant);
      };
      char buf[64];
      for (int k = 0; k <= model.order; ++k) {
        double m = numeric::eps_coefficient(at, k, 4).abs().maxCoeff();
        std::snprintf(buf, sizeof buf, "%d,%.6e\n", k, m);
        out << buf;
        if (s.expect_below >= 0 && !(m < s.expect_below)) ok = false;
      }
    } catch (const numeric::EvalError& e) {
      std::cerr << "error: " << e.what() << "\n  hint: bind every parameter with --set and keep the grid away from singular points\n";
      return kUsage;
    }
    emit(c, out.str());
    return ok ? kOk : kFailed;
  }

  std::vector<numeric::ScanRow> rows;
  try {
    rows = numeric::residual_order_scan(spec);
    if (!s.surface.empty()) {
      std::ofstream f(s.surface, std::ios::binary);
      if (!f) throw UsageError("cannot write " + s.surface);
      numeric::Env<double> at = params;
      at[eps] = epsilon;
      numeric::write_surface(f, values.begin()->second, at, spec.grid, spec.dawson_variant);
    }
  } catch (const numeric::EvalError& e) {
    std::cerr << "error: " << e.what() << "\n  hint: bind every parameter with --set and keep the grid away from singular points\n";
    return kUsage;
  }
  std::ostringstream out;
  numeric::write_scan_csv(out, rows);
  emit(c, out.str());

  bool ok = true;
  if (s.expect_order >= 0) {
    for (const auto& r : rows) {
      if (r.observed_order && std::abs(*r.observed_order - s.expect_order) > 0.1) ok = false;
    }
  }
  if (s.expect_below >= 0) {
    for (const auto& r : rows) ok = ok && r.max_residual < s.expect_below;
  }
  return ok ? kOk : kFailed;
}

// ---- parse / render -------------------------------------------------------------

int run_parse(const Common& c) {
  ModelSpec model = load_model(c.model_path);
  Format fmt = output_format(c);
  std::ostringstream out;
  header(out, model, c);
  const SymbolTable& sy = model.symbols;
  out << "params: " << join(sy.parameters()) << "\n";
  if (sy.small()) out << "small: " << *sy.small() << " order " << model.order << "\n";
  out << "indep: " << join(sy.independents()) << "\n";
  out << "dep: " << join(sy.dependents()) << "\n";
  for (const auto& f : sy.functions()) out << "func: " << f.name << "(" << join(f.args, ",") << ")\n";
  for (const auto& e : model.equations) out << "eq " << e.name << ": " << render(normalize(e.expr), fmt) << " = 0\n";
  for (const auto& k : model.constraints) {
    out << "constraint " << k.name << ": " << render(normalize(k.expr), fmt) << " = 0";
    if (!k.solve_for.empty()) out << " for " << k.solve_for;
    out << "\n";
  }
  for (const auto& g : model.generators) {
    out << "gen " << g.name;
    if (!g.given.empty()) out << " [given " << join(g.given, ", ") << "]";
    out << "\n";
    for (std::size_t i = 0; i < g.orders.size(); ++i) {
      for (const auto& [k, e] : g.orders[i].xi) out << "  order " << i << " xi[" << k << "] = " << render(e, fmt) << "\n";
      for (const auto& [k, e] : g.orders[i].eta) out << "  order " << i << " eta[" << k << "] = " << render(e, fmt) << "\n";
    }
  }
  for (const auto& s : model.solutions) {
    out << (s.ansatz ? "ansatz " : "sol ") << s.name;
    if (!s.given.empty()) out << " [given " << join(s.given, ", ") << "]";
    out << "\n";
    for (const auto& [k, e] : s.values) out << "  " << k << " = " << render(e, fmt) << "\n";
    if (s.ansatz) out << "  unknowns " << join(s.unknowns) << "\n";
  }
  for (const auto& d : model.definitions) {
    out << "def " << d.name;
    if (!d.given.empty()) out << " [given " << join(d.given, ", ") << "]";
    std::vector<std::string> formals;
    for (const auto& f : d.definition.formals) formals.push_back(render(f));
    out << ": " << d.definition.name << "(" << join(formals, ",") << ") = " << render(d.definition.body, fmt) << "\n";
  }
  emit(c, out.str());
  return kOk;
}

int run_render(const Common& c, const std::string& text, bool raw) {
  ModelSpec model = load_model(c.model_path);
  ExpressionResult r = parse_expression(text, model.symbols);
  for (const Diagnostic& d : r.diagnostics) std::cerr << format_diagnostic(d) << "\n";
  if (!r.expr) return kUsage;
  Expr e = *r.expr;
  if (!c.sets.empty()) e = substitute(e, exact_settings(model, c.sets));
  emit(c, render(raw ? e : normalize(e), output_format(c)) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate conditional symmetries of evolution equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "approxsym 1.0");

  Common common;
  VerifyOptions verify;
  ScanOptions scan;
  std::string expression;
  bool raw = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model,-m", common.model_path, "model file (.sym)");
    sub->add_option("--set", common.sets, "bind a parameter, NAME=VALUE");
    sub->add_option("--format", common.format, "plain or latex")->check(CLI::IsMember({"plain", "latex"}));
    sub->add_option("--out,-o", common.out, "write the result to FILE instead of stdout");
    sub->add_flag("--stamp", common.stamp, "add a time stamp line to reports");
  };
  auto add_symbolic = [&](CLI::App* sub) {
    sub->add_option("--constraint", common.constraints, "apply a named constraint in addition to the given list");
    sub->add_option("--use", common.use, "substitute a named definition");
    sub->add_option("--q", verify.q, "number of invariant surface conditions (0 = classical)");
    sub->add_option("--select", verify.select, "dependent variables carrying the conditions, comma separated");
    sub->add_option("--normalization", verify.normalization, "independent variable whose xi is set to 1");
    sub->add_option("--p", verify.p, "perturbation order (default: the model's)");
  };

  CLI::App* parse = app.add_subcommand("parse", "parse a model and print its canonical form");
  add_common(parse);

  CLI::App* ver = app.add_subcommand("verify", "check generators, solutions or definitions");
  add_common(ver);
  add_symbolic(ver);
  ver->add_option("--gen,-g", verify.generators, "generator name (repeatable)");
  ver->add_option("--sol,-s", verify.solutions, "solution or ansatz name (repeatable)");
  ver->add_option("--def,-d", verify.definitions, "definition name (repeatable)");

  CLI::App* det = app.add_subcommand("determining", "print the determining system of a generator");
  add_common(det);
  add_symbolic(det);
  det->add_option("--gen,-g", verify.generators, "generator name");

  CLI::App* sc = app.add_subcommand("scan", "residual-order scan of a solution on a grid");
  add_common(sc);
  sc->add_option("--sol,-s", scan.solution, "solution name");
  sc->add_option("--preset", scan.preset, "figure parameter set")->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  sc->add_option("--epsilon", scan.epsilon, "largest epsilon");
  sc->add_option("--halvings", scan.halvings, "number of halvings of epsilon");
  sc->add_option("--t", scan.t_range, "t range A,B");
  sc->add_option("--x", scan.x_range, "x range A,B");
  sc->add_option("--points", scan.points, "grid points NT,NX");
  sc->add_option("--surface", scan.surface, "also write the solution surface at the largest epsilon");
  sc->add_option("--dawson", scan.dawson, "standard or printed Dawson integral");
  sc->add_option("--corrupt", scan.corrupt, "negative control: add K*eps*t*u0 to the solution");
  sc->add_option("--expect-order", scan.expect_order, "exit 1 unless every observed order is within 0.1");
  sc->add_option("--expect-below", scan.expect_below, "exit 1 unless every residual is below this");
  sc->add_flag("--coefficients", scan.coefficients,
               "print the largest eps^k coefficient of the residual, k <= p, using finite differences");
  sc->add_option("--fd-step", scan.fd_step, "finite-difference step for --coefficients");

  CLI::App* ren = app.add_subcommand("render", "normalize and print an expression");
  add_common(ren);
  ren->add_option("expression", expression, "expression in .sym syntax")->required();
  ren->add_flag("--raw", raw, "print the tree as parsed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*parse) return run_parse(common);
    if (*ver) return run_verify(common, verify);
    if (*det) return run_determining(common, verify);
    if (*sc) return run_scan(common, scan);
    if (*ren) return run_render(common, expression, raw);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SymmetryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PerturbationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
