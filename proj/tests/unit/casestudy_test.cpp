#include "approxsym/casestudy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "approxsym/normalize.hpp"
#include "approxsym/parser.hpp"
#include "approxsym/render.hpp"

namespace approxsym {
namespace {

namespace fs = std::filesystem;
using namespace casestudy;

const fs::path kModels = APPROXSYM_MODELS_DIR;

ModelSpec load(const std::string& name) {
  ParseResult r = parse_model_file(kModels / (name + ".sym"));
  if (!r.ok()) throw std::runtime_error(format_diagnostic(r.diagnostics.at(0)));
  return *r.model;
}

void expect_same(const Expr& built, const Expr& parsed, const std::string& what) {
  EXPECT_EQ(normalize(built), normalize(parsed)) << what << "\n  built  " << render(built) << "\n  parsed "
                                                 << render(parsed);
}

// Everything the builder model declares must be in the file with the same trees.
void expect_contained(const ModelSpec& built, const ModelSpec& parsed) {
  EXPECT_EQ(built.order, parsed.order);
  EXPECT_EQ(built.symbols.independents(), parsed.symbols.independents());
  EXPECT_EQ(built.symbols.dependents(), parsed.symbols.dependents());
  ASSERT_EQ(built.equations.size(), parsed.equations.size());
  for (std::size_t i = 0; i < built.equations.size(); ++i) {
    expect_same(built.equations[i].expr, parsed.equations[i].expr, "equation");
  }
  for (const auto& c : built.constraints) {
    const Constraint* p = parsed.find_constraint(c.name);
    ASSERT_NE(p, nullptr) << c.name;
    EXPECT_EQ(c.solve_for, p->solve_for) << c.name;
    expect_same(c.expr, p->expr, "constraint " + c.name);
  }
  for (const auto& g : built.generators) {
    const GeneratorSpec* p = parsed.find_generator(g.name);
    ASSERT_NE(p, nullptr) << g.name;
    EXPECT_EQ(g.given, p->given) << g.name;
    ASSERT_EQ(g.orders.size(), p->orders.size()) << g.name;
    for (std::size_t k = 0; k < g.orders.size(); ++k) {
      for (const auto& [v, e] : g.orders[k].xi) expect_same(e, p->orders[k].xi.at(v), g.name + " xi " + v);
      for (const auto& [v, e] : g.orders[k].eta) expect_same(e, p->orders[k].eta.at(v), g.name + " eta " + v);
    }
  }
  for (const auto& s : built.solutions) {
    const SolutionSpec* p = parsed.find_solution(s.name);
    ASSERT_NE(p, nullptr) << s.name;
    EXPECT_EQ(s.given, p->given) << s.name;
    EXPECT_EQ(s.unknowns, p->unknowns) << s.name;
    EXPECT_EQ(s.ansatz, p->ansatz) << s.name;
    for (const auto& [v, e] : s.values) expect_same(e, p->values.at(v), s.name);
  }
  for (const auto& d : built.definitions) {
    const DefinitionSpec* p = parsed.find_definition(d.name);
    ASSERT_NE(p, nullptr) << d.name;
    EXPECT_EQ(d.given, p->given) << d.name;
    expect_same(d.definition.body, p->definition.body, d.name);
  }
}

TEST(CaseStudy, BuiltModelMatchesTheFile) {
  ModelSpec built = rdc_model();
  EXPECT_FALSE(built.generators.empty());
  EXPECT_FALSE(built.solutions.empty());
  expect_contained(built, load("rdc"));
}

TEST(CaseStudy, BuiltHyperbolicModelMatchesTheFile) {
  ModelSpec built = rdc_hyperbolic_model();
  EXPECT_EQ(built.order, 1);
  EXPECT_FALSE(built.generators.empty());
  expect_contained(built, load("rdc_hyp"));
}

TEST(CaseStudy, PresetBranches) {
  ASSERT_EQ(presets().size(), 3u);
  EXPECT_EQ(find_preset("fig1")->params.branch(), Branch::Positive);
  EXPECT_EQ(find_preset("fig2")->params.branch(), Branch::Zero);
  EXPECT_EQ(find_preset("fig3")->params.branch(), Branch::Negative);
  for (const auto& p : presets()) {
    EXPECT_TRUE(p.params.valid()) << p.name;
    EXPECT_GT(p.epsilon, 0) << p.name;
  }
  EXPECT_EQ(find_preset("fig4"), nullptr);
}

TEST(CaseStudy, PresetNumericParameters) {
  auto p = find_preset("fig1")->numeric_parameters();
  EXPECT_DOUBLE_EQ(p.at("alpha"), 2);
  EXPECT_NEAR(p.at("delta"), std::sqrt(8 * 0.4 * 1.33 - 4), 1e-15);
  EXPECT_EQ(find_preset("fig2")->numeric_parameters().at("delta"), 0);
  EXPECT_NEAR(find_preset("fig2")->numeric_parameters().at("c2"), 2 * std::acos(-1.0), 1e-15);
}

TEST(CaseStudy, Discriminant) {
  RDCParameters p{2, 1, 1};
  EXPECT_EQ(p.discriminant(), 4);
  EXPECT_EQ(p.branch(), Branch::Positive);
  EXPECT_EQ(branch_constraint(Branch::Negative), "negative");
  EXPECT_EQ((RDCParameters{4, 2, 1}).branch(), Branch::Zero);
  EXPECT_EQ((RDCParameters{4, 1, 1}).branch(), Branch::Negative);
}

}  // namespace
}  // namespace approxsym
