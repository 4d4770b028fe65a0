#include "approxsym/casestudy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "approxsym/normalize.hpp"

namespace approxsym::casestudy {

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Positive: return "positive";
    case Branch::Zero: return "zero";
    case Branch::Negative: return "negative";
  }
  return "?";
}

std::string branch_constraint(Branch b) { return branch_name(b); }

Rational RDCParameters::discriminant() const {
  Rational d = 8 * beta * gamma - alpha * alpha;
  d.canonicalize();
  return d;
}

Branch RDCParameters::branch() const {
  int s = sgn(discriminant());
  return s > 0 ? Branch::Positive : (s == 0 ? Branch::Zero : Branch::Negative);
}

Bindings RDCParameters::bindings() const {
  return {{parameter("alpha"), number(alpha)},
          {parameter("beta"), number(beta)},
          {parameter("gamma"), number(gamma)}};
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    Rational alpha(2);
    Rational beta(2, 5);
    Rational eps(3, 100);
    return std::vector<Preset>{
        {"fig1", "sol1", {alpha, beta, Rational(133, 100)}, eps, {1.0, 0.0, 1.0, 0.0}},
        {"fig2", "sol2", {alpha, beta, Rational(5, 4)}, eps, {1.0, 2 * std::numbers::pi, 1.0, 0.0}},
        {"fig3", "sol3", {alpha, beta, Rational(117, 100)}, eps, {1.0, 0.0, 1.0, 0.0}},
    };
  }();
  return all;
}

std::map<std::string, double> Preset::numeric_parameters() const {
  std::map<std::string, double> out{
      {"alpha", params.alpha.get_d()}, {"beta", params.beta.get_d()}, {"gamma", params.gamma.get_d()}};
  for (std::size_t i = 0; i < c.size(); ++i) out["c" + std::to_string(i + 1)] = c[i];
  out["delta"] = std::sqrt(std::abs(params.discriminant().get_d()));
  return out;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

namespace {

Expr P(const char* name) { return parameter(name); }
Expr V(const char* name) { return variable(name); }
Expr R(long n, long d = 1) { return number(Rational(n, d)); }

// jets of u; `k` >= 0 selects u[k]
Expr U(std::vector<std::string> wrt = {}, int k = -1) { return jet("u", std::move(wrt), k); }

Expr F(const char* name, const char* arg, int d = 0) { return function(name, {V(arg)}, {d}); }

void declare(ModelSpec& m, std::initializer_list<const char*> names, SymbolKind kind) {
  for (const char* n : names) {
    if (!m.symbols.declare(n, kind)) throw std::logic_error(std::string("duplicate symbol ") + n);
  }
}

Constraint relation(const std::string& name, Expr lhs_minus_rhs, const std::string& target) {
  return Constraint{name, normalize(lhs_minus_rhs), target, false, {}};
}

Constraint ode(const std::string& name, Expr lhs_minus_rhs) {
  return Constraint{name, normalize(lhs_minus_rhs), "", true, {}};
}

GeneratorOrder order(std::map<std::string, Expr> xi, std::map<std::string, Expr> eta) {
  GeneratorOrder o;
  for (auto& [k, v] : xi) o.xi[k] = normalize(v);
  for (auto& [k, v] : eta) o.eta[k] = normalize(v);
  return o;
}

DefinitionSpec definition(const std::string& name, std::vector<std::string> given, const char* fn,
                          const char* arg, Expr body) {
  DefinitionSpec d;
  d.name = name;
  d.given = std::move(given);
  d.definition = FunctionDefinition{fn, -1, {V(arg)}, normalize(body)};
  return d;
}

SolutionSpec solution(const std::string& name, std::vector<std::string> given, Expr u,
                      std::vector<std::string> unknowns = {}) {
  SolutionSpec s;
  s.name = name;
  s.given = std::move(given);
  s.values["u"] = normalize(u);
  s.unknowns = std::move(unknowns);
  s.ansatz = !s.unknowns.empty();
  return s;
}

// u_t - (u u_x)_x - alpha u u_x + beta u (1 - gamma u), expanded by hand
Expr rdc_operator(const Expr& u, const Expr& ut, const Expr& ux, const Expr& uxx) {
  Expr alpha = P("alpha"), beta = P("beta"), gamma = P("gamma");
  return ut - u * uxx - ux * ux - alpha * u * ux + beta * u * (R(1) - gamma * u);
}

void discriminant_relations(ModelSpec& m) {
  Expr disc = R(8) * P("beta") * P("gamma") - P("alpha") * P("alpha");
  Expr d2 = P("delta") * P("delta");
  m.constraints.push_back(relation("positive", disc - d2, "gamma"));
  m.constraints.push_back(relation("zero", disc, "gamma"));
  m.constraints.push_back(relation("negative", disc + d2, "gamma"));
}

}  // namespace

ModelSpec rdc_model() {
  ModelSpec m;
  m.name = "RDC";
  declare(m, {"alpha", "beta", "gamma", "delta", "k1", "k2", "c1", "c2"}, SymbolKind::Parameter);
  declare(m, {"t", "x"}, SymbolKind::Independent);
  declare(m, {"u"}, SymbolKind::Dependent);
  m.symbols.declare_function({"f", {"t"}});
  m.symbols.declare_function({"g", {"t"}});

  m.equations.push_back({"RDC", normalize(rdc_operator(U(), U({"t"}), U({"x"}), U({"x", "x"}))), {}});
  discriminant_relations(m);

  Expr beta = P("beta"), alpha = P("alpha"), delta = P("delta");
  Expr f = F("f", "t"), f1 = F("f", "t", 1), f2 = F("f", "t", 2);
  Expr g = F("g", "t"), g1 = F("g", "t", 1);
  m.constraints.push_back(ode("cf", f * f2 - R(2) * f1 * f1 - beta * f * f1));
  m.constraints.push_back(ode("cg", g1 - beta * g - g * g));

  auto xi1 = [&](std::vector<std::string> given, const std::string& name) {
    return GeneratorSpec{name, std::move(given), {order({{"t", R(1)}, {"x", f}}, {{"u", f1 / f * U()}})}, {}};
  };
  auto xi2 = [&](std::vector<std::string> given, const std::string& name) {
    return GeneratorSpec{name, std::move(given), {order({{"t", R(1)}}, {{"u", g * U()}})}, {}};
  };
  m.generators.push_back(xi1({"cf"}, "Xi1"));
  m.generators.push_back(xi2({"cg"}, "Xi2"));

  Expr ebt = exp(beta * V("t"));
  m.definitions.push_back(definition("f_closed", {"cf"}, "f", "t", P("k1") / (R(1) - P("k2") * ebt)));
  m.definitions.push_back(
      definition("g_closed", {"cg"}, "g", "t", beta * P("k1") * ebt / (R(1) - P("k1") * ebt)));
  m.definitions.push_back(definition("g_minus_beta", {"cg"}, "g", "t", -beta));

  Expr t = V("t"), x = V("x"), c1 = P("c1"), c2 = P("c2");
  Expr decay = exp(-beta * t - alpha / R(4) * x);
  m.solutions.push_back(solution("sol1RDC", {"positive"}, c1 * decay * sqrt(cos(delta / R(2) * x + c2))));
  m.solutions.push_back(solution("sol2RDC", {"zero"}, c1 * decay * sqrt(x + c2)));
  m.solutions.push_back(solution(
      "sol3RDC", {"negative"},
      c1 * exp(-beta * t - (alpha + delta) / R(4) * x) * sqrt(exp(delta * x) + c2)));

  m.generators.push_back(xi2({}, "Xi2_ansatz"));
  m.generators.push_back(xi1({}, "Xi1_ansatz"));
  return m;
}

ModelSpec rdc_hyperbolic_model() {
  ModelSpec m;
  m.name = "RDChyp";
  declare(m,
          {"alpha", "beta", "gamma", "delta", "k1", "k2", "k3", "k4", "k5", "k6", "k7", "k8", "c1",
           "c2", "c3", "c4", "a", "b", "d", "h"},
          SymbolKind::Parameter);
  declare(m, {"eps"}, SymbolKind::Small);
  m.order = 1;
  declare(m, {"t", "x"}, SymbolKind::Independent);
  declare(m, {"u"}, SymbolKind::Dependent);
  for (const char* fn : {"f1", "f2", "f3"}) m.symbols.declare_function({fn, {"x"}});

  Expr eps = P("eps");
  m.equations.push_back(
      {"RDChyp", normalize(eps * U({"t", "t"}) + rdc_operator(U(), U({"t"}), U({"x"}), U({"x", "x"}))), {}});
  discriminant_relations(m);

  Expr alpha = P("alpha"), beta = P("beta"), gamma = P("gamma"), delta = P("delta");
  Expr t = V("t"), x = V("x");
  Expr f1 = F("f1", "x"), f1p = F("f1", "x", 1), f1pp = F("f1", "x", 2);
  Expr f2 = F("f2", "x"), f2p = F("f2", "x", 1), f2pp = F("f2", "x", 2);
  Expr f3 = F("f3", "x"), f3p = F("f3", "x", 1), f3pp = F("f3", "x", 2);
  Expr bg2 = R(2) * beta * gamma;
  m.constraints.push_back(ode("cf1", f1pp + alpha * f1p + bg2 * f1));
  m.constraints.push_back(ode("cf2", f2pp - alpha * f2p + bg2 * f2));
  m.constraints.push_back(ode("cf2_printed", f2pp - alpha * f1p + bg2 * f2));
  m.constraints.push_back(
      ode("cf3", f3pp - (alpha * alpha - R(8) * beta * gamma) * f3 + P("k2")));

  // seeds are in u[0]
  Expr u0 = U({}, 0);
  GeneratorOrder base = order({{"t", R(1)}}, {{"u", -beta * u0}});
  Expr xi1 = R(1, 2) * exp(beta * t) * f2 * u0 * u0 - exp(-beta * t) * f3;
  Expr rest = exp(beta * t) / R(4) * (f2p - alpha * f2) * u0 * u0 * u0 -
              exp(-beta * t) / R(4) * (f3p - alpha * f3) * u0 +
              (P("k1") * exp(-beta * t) / R(4) - beta * beta) * u0;
  Expr f1_term = exp(R(-3) * beta * t) * f1;
  auto approx_oper = [&](const std::string& name, std::vector<std::string> given, Expr f1_part) {
    return GeneratorSpec{name, std::move(given), {base, order({{"x", xi1}}, {{"u", f1_part + rest}})}, {}};
  };
  m.generators.push_back(approx_oper("ApproxOper", {"cf1", "cf2", "cf3"}, f1_term / u0));
  m.generators.push_back(approx_oper("ApproxOper_printed", {"cf1", "cf2", "cf3"}, f1_term));
  m.generators.push_back(approx_oper("ApproxOper_cf2_printed", {"cf1", "cf2_printed", "cf3"}, f1_term / u0));
  m.generators.push_back(
      GeneratorSpec{"ApproxSimple", {}, {base, order({}, {{"u", -beta * beta * u0}})}, {}});

  Expr k3 = P("k3"), k4 = P("k4"), k5 = P("k5"), k6 = P("k6"), k7 = P("k7"), k8 = P("k8"),
       k2 = P("k2");
  Expr ap = (alpha + delta) / R(2) * x, am = (alpha - delta) / R(2) * x, half = delta / R(2) * x;
  auto& defs = m.definitions;
  defs.push_back(definition("f1_pos", {"negative", "cf1"}, "f1", "x", k3 * exp(-ap) + k4 * exp(-am)));
  defs.push_back(definition("f2_pos", {"negative", "cf2"}, "f2", "x", k5 * exp(ap) + k6 * exp(am)));
  defs.push_back(definition("f3_pos", {"negative", "cf3"}, "f3", "x",
                            k7 * exp(delta * x) + k8 * exp(-delta * x) + k2 / (delta * delta)));
  defs.push_back(definition("f1_zero", {"zero", "cf1"}, "f1", "x", exp(-alpha / R(2) * x) * (k3 + k4 * x)));
  defs.push_back(definition("f2_zero", {"zero", "cf2"}, "f2", "x", exp(alpha / R(2) * x) * (k5 + k6 * x)));
  defs.push_back(
      definition("f3_zero", {"zero", "cf3"}, "f3", "x", -k2 / R(2) * x * x + k7 * x + k8));
  defs.push_back(definition("f1_neg", {"positive", "cf1"}, "f1", "x",
                            exp(-alpha / R(2) * x) * (k3 * cos(half) + k4 * sin(half))));
  defs.push_back(definition("f2_neg_printed", {"positive", "cf2"}, "f2", "x",
                            exp(alpha / R(2) * x) * (k3 * cos(half) + k4 * sin(half))));
  defs.push_back(definition("f2_neg", {"positive", "cf2"}, "f2", "x",
                            exp(alpha / R(2) * x) * (k5 * cos(half) + k6 * sin(half))));
  defs.push_back(definition("f3_neg", {"positive", "cf3"}, "f3", "x",
                            k7 * cos(delta * x) + k8 * sin(delta * x) - k2 / (delta * delta)));
  defs.push_back(definition("f2_pos_vs_printed", {"negative", "cf2_printed"}, "f2", "x",
                            k5 * exp(ap) + k6 * exp(am)));

  m.generators.push_back(GeneratorSpec{
      "ApproxDelta",
      {"negative"},
      {base, order({{"x", -exp(-beta * t - delta * x)}},
                   {{"u", ((alpha + delta) / R(4) * exp(-beta * t - delta * x) - beta * beta) * u0}})},
      {}});
  m.generators.push_back(GeneratorSpec{
      "ApproxDawson",
      {"zero"},
      {base, order({{"x", -exp(-beta * t)}}, {{"u", (alpha / R(4) * exp(-beta * t) - beta * beta) * u0}})},
      {}});

  Expr c1 = P("c1"), c2 = P("c2"), c3 = P("c3"), c4 = P("c4");
  Expr a = P("a"), b = P("b"), d = P("d"), h = P("h");
  Expr secular = -c1 * beta * beta * t;
  Expr decay = exp(-beta * t - alpha / R(4) * x);
  Expr cosc2 = cos(half + c2);
  Expr s3 = exp(-beta * t - (alpha + delta) / R(4) * x) * sqrt(exp(delta * x) + c2);
  Expr edx = exp(delta * x);

  auto& sols = m.solutions;
  sols.push_back(solution("sol1", {"positive"},
                          decay * sqrt(cosc2) * (c1 + eps * (c3 * cos(half + c4) / cosc2 + secular))));
  sols.push_back(solution("sol2", {"zero"},
                          decay * sqrt(x + c2) * (c1 + eps * ((c3 * x + c4) / (x + c2) + secular))));
  sols.push_back(solution("sol3", {"negative"},
                          s3 * (c1 + eps * ((c3 * edx + c4) / (edx + c2) + secular))));
  sols.push_back(solution("sol3_printed", {"negative"},
                          s3 * (c1 + eps * ((c3 * edx + c4 * delta) / (delta * edx + c2) + secular))));
  sols.push_back(solution(
      "sol1_ansatz", {"positive"},
      decay * sqrt(cosc2) * (c1 + eps * ((a * cos(half) + b * sin(half)) / cosc2 + h * t)), {"a", "b", "h"}));
  sols.push_back(solution("sol2_ansatz", {"zero"},
                          decay * sqrt(x + c2) * (c1 + eps * ((a * x + b) / (x + c2) + h * t)),
                          {"a", "b", "h"}));
  sols.push_back(solution("sol3_ansatz", {"negative"},
                          s3 * (c1 + eps * ((a * edx + b) / (edx + c2) + h * t)), {"a", "b", "h"}));

  Expr ebt = exp(-beta * t);
  Expr lead = c1 * exp(-(alpha - delta) / R(4) * x);
  Expr third = exp(-(alpha + R(3) * delta) / R(4) * x);
  Expr shared = (c3 - c1 * delta / (R(2) * beta) * ebt) * third;
  sols.push_back(solution(
      "delta_extra_printed", {"negative"},
      ebt * (lead + eps * (R(16) / (c1 * c1 * (alpha - delta) * (alpha + R(3) * delta)) +
                           (c2 + secular) * exp(-(alpha + delta) / R(4) * x) + shared))));
  sols.push_back(solution(
      "delta_extra", {"negative"},
      ebt * (lead + eps * (R(8) * delta * exp(-delta * x) / ((alpha - delta) * (alpha - R(5) * delta)) +
                           (c2 + secular) * exp(-(alpha - delta) / R(4) * x) + shared))));
  sols.push_back(solution(
      "delta_extra_ansatz", {"negative"},
      ebt * (lead + eps * (a * exp(-delta * x) + d + (c2 + h * t) * exp(-(alpha - delta) / R(4) * x) +
                           (c3 + b * ebt) * third)),
      {"a", "b", "d", "h"}));

  Expr ax4 = exp(-alpha / R(4) * x);
  Expr daw = function("dawson", {sqrt(alpha * x) / R(2)});
  Expr daw_part = R(-2) / alpha + R(2) / sqrt(alpha * x) * (R(2) / alpha + x) * daw;
  Expr half_life = c2 - c1 * ebt / (R(2) * beta);
  sols.push_back(solution(
      "dawson_extra", {"zero"},
      ebt * (c1 * ax4 * sqrt(x) +
             eps * (daw_part + half_life * ax4 / sqrt(x) + sqrt(x) * (c3 + secular) * ax4))));
  sols.push_back(solution(
      "dawson_extra_printed", {"zero"},
      ebt * (c1 * ax4 * sqrt(x) + eps * (daw_part + R(1) / sqrt(x) * half_life +
                                         sqrt(x) * (c3 - c1 * beta * t * t) * ax4))));
  return m;
}

}  // namespace approxsym::casestudy
