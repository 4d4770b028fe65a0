#include "approxsym/symmetry.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "approxsym/normalize.hpp"
#include "approxsym/parser.hpp"
#include "approxsym/render.hpp"

namespace approxsym {
namespace {

namespace fs = std::filesystem;
const fs::path kModels = APPROXSYM_MODELS_DIR;

ModelSpec load(const std::string& name) {
  ParseResult r = parse_model_file(kModels / (name + ".sym"));
  if (!r.ok()) throw std::runtime_error(format_diagnostic(r.diagnostics.at(0)));
  return *r.model;
}

const DefinitionSpec& definition(const ModelSpec& m, const std::string& name) {
  for (const auto& d : m.definitions) {
    if (d.name == name) return d;
  }
  throw std::out_of_range(name);
}

Expr heat_fn(const std::string& name, std::vector<int> partials) {
  return function(name, {variable("t"), variable("x"), jet("u")}, std::move(partials));
}

class Heat : public ::testing::Test {
 protected:
  ModelSpec model = load("heat");
  Problem problem = make_problem(model, *model.find_generator("point"));
  DeterminingSystem system = determining_system(problem, build_manifold(problem, {0}));

  bool has_equation(const Expr& e) const {
    for (const auto& d : system.equations) {
      if (is_zero(d.equation - e) || is_zero(d.equation + e)) return true;
    }
    return false;
  }

  // every determining equation after substituting the three closed forms
  std::vector<Expr> after(const std::vector<FunctionDefinition>& defs) const {
    std::vector<Expr> out;
    for (const auto& d : system.equations) {
      Expr e = d.equation;
      for (const auto& def : defs) e = substitute_function(e, def);
      out.push_back(normalize(e));
    }
    return out;
  }
};

TEST_F(Heat, SystemResumsAndContainsTheClassicalEquations) {
  EXPECT_TRUE(resums(system));
  EXPECT_TRUE(has_equation(heat_fn("T", {0, 1, 0})));  // T_x
  EXPECT_TRUE(has_equation(heat_fn("T", {0, 0, 1})));  // T_u
  EXPECT_TRUE(has_equation(heat_fn("X", {0, 0, 2})));  // X_uu
  // U_t = U_xx
  EXPECT_TRUE(has_equation(heat_fn("U", {0, 2, 0}) - heat_fn("U", {1, 0, 0})));
}

TEST_F(Heat, LieGeneratorsAnnihilateTheSystem) {
  std::vector<FunctionDefinition> lie;
  for (const char* n : {"T_lie", "X_lie", "U_lie"}) lie.push_back(definition(model, n).definition);
  for (const Expr& e : after(lie)) EXPECT_TRUE(is_zero(e)) << render(e);
}

TEST_F(Heat, NonSymmetryIsRejected) {
  // u -> u^2 generates no symmetry of the heat equation
  std::vector<FunctionDefinition> wrong = {definition(model, "T_lie").definition, definition(model, "X_lie").definition};
  Expr t = variable("t"), x = variable("x"), u = jet("u");
  wrong.push_back(FunctionDefinition{"U", -1, {t, x, u}, normalize(u * u)});
  bool some_nonzero = false;
  for (const Expr& e : after(wrong)) some_nonzero = some_nonzero || !is_zero(e);
  EXPECT_TRUE(some_nonzero);
}

// q = 1 for the equations in t, x with a generator normalized by xi[t] = 1
class Resummation : public ::testing::TestWithParam<std::string> {};

TEST_P(Resummation, EveryGeneratedSystemResums) {
  ModelSpec m = load(GetParam());
  int q = GetParam() == "heat" ? 0 : 1;
  ASSERT_FALSE(m.generators.empty());
  for (const auto& gen : m.generators) {
    Problem p = make_problem(m, gen);
    DeterminingSystem s = determining_system(p, build_manifold(p, {q}));
    EXPECT_TRUE(resums(s)) << GetParam() << " " << gen.name;
    EXPECT_FALSE(s.residuals.empty());
  }
}

INSTANTIATE_TEST_SUITE_P(Models, Resummation, ::testing::Values("rdc", "rdc_hyp", "heat"));

TEST(Manifold, Errors) {
  ModelSpec m = load("rdc");
  Problem p = make_problem(m, *m.find_generator("Xi1"));
  EXPECT_THROW(build_manifold(p, {2}), SymmetryError);
  EXPECT_THROW(build_manifold(p, {-1}), SymmetryError);
  ManifoldOptions bad_selection{1, {"v"}};
  EXPECT_THROW(build_manifold(p, bad_selection), SymmetryError);
  ManifoldOptions bad_normalization{1, {}, 7};
  EXPECT_THROW(build_manifold(p, bad_normalization), SymmetryError);
}

TEST(Manifold, CountSelections) {
  EXPECT_EQ(count_selections(1, 0), 1);
  EXPECT_EQ(count_selections(1, 1), 1);
  EXPECT_EQ(count_selections(3, 2), 3);
  EXPECT_EQ(count_selections(5, 2), 10);
  EXPECT_EQ(count_selections(2, 3), 0);
}

TEST(Constraints, BranchIsSolvedForItsTarget) {
  ModelSpec m = load("rdc");
  ConstraintSet c = resolve_constraints(m, {"positive"});
  Expr alpha = parameter("alpha"), beta = parameter("beta"), delta = parameter("delta");
  ASSERT_TRUE(c.parameters.count(parameter("gamma")));
  EXPECT_TRUE(is_zero(c.parameters.at(parameter("gamma")) - (alpha * alpha + delta * delta) / (8 * beta)));
  EXPECT_TRUE(c.notes.empty());
}

TEST(Constraints, FixedTargetIsCheckedInstead) {
  ModelSpec m = load("rdc");
  Bindings fixed{{parameter("alpha"), number(1)}, {parameter("beta"), number(1)}, {parameter("gamma"), number(1)},
                 {parameter("delta"), number(1)}};
  ConstraintSet bad = resolve_constraints(m, {"positive"}, fixed);
  EXPECT_FALSE(bad.notes.empty());
  fixed[parameter("delta")] = number(7) / 1;
  fixed[parameter("gamma")] = number(50) / 8;  // 8*50/8 - 1 = 49
  ConstraintSet good = resolve_constraints(m, {"positive"}, fixed);
  EXPECT_TRUE(good.notes.empty());
}

TEST(Invariance, ConstraintOnTheGeneratorIsNeeded) {
  ModelSpec m = load("rdc");
  Problem with = make_problem(m, *m.find_generator("Xi2"));
  Problem without = make_problem(m, *m.find_generator("Xi2_ansatz"));
  EXPECT_TRUE(all_zero(invariance_residual(with, build_manifold(with, {1}))));
  EXPECT_FALSE(all_zero(invariance_residual(without, build_manifold(without, {1}))));
}

TEST(Invariance, DefinitionSatisfiesItsConstraint) {
  ModelSpec m = load("rdc");
  for (const char* n : {"f_closed", "g_closed", "g_minus_beta"}) {
    for (const auto& c : check_definition(m, definition(m, n))) EXPECT_TRUE(is_zero(c.residual)) << n;
  }
}

}  // namespace
}  // namespace approxsym
