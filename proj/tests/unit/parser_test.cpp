#include "approxsym/parser.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "approxsym/normalize.hpp"
#include "approxsym/render.hpp"
#include "approxsym/series.hpp"
#include "model_dump.hpp"
#include "random_expr.hpp"

namespace approxsym {
namespace {

namespace fs = std::filesystem;
using testing::dump_model;
using testing::read_file;
using testing::RandomExpr;
using testing::RandomExprOptions;

const fs::path kGolden = APPROXSYM_GOLDEN_DIR;
const fs::path kModels = APPROXSYM_MODELS_DIR;

void check_golden(const fs::path& expected, const std::string& actual) {
  if (std::getenv("APPROXSYM_UPDATE_GOLDEN")) {
    std::ofstream(expected, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(fs::exists(expected)) << expected;
  EXPECT_EQ(read_file(expected), actual) << expected;
}

ParseResult parse_golden(const fs::path& p) {
  ParseOptions o;
  o.filename = p.filename().string();
  o.base_dir = p.parent_path();
  return parse_model(read_file(p), o);
}

class GoldenTrees : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldenTrees, ParsesToTheExpectedCanonicalTrees) {
  fs::path src = kGolden / "sym" / (GetParam() + ".sym");
  ParseResult r = parse_golden(src);
  for (const auto& d : r.diagnostics) ADD_FAILURE() << format_diagnostic(d);
  ASSERT_TRUE(r.ok());
  check_golden(kGolden / "sym" / (GetParam() + ".tree"), dump_model(*r.model));
}

INSTANTIATE_TEST_SUITE_P(Sym, GoldenTrees,
                         ::testing::Values("basic", "functions", "approx", "include_main"));

class ModelTrees : public ::testing::TestWithParam<std::string> {};

TEST_P(ModelTrees, ShippedModelsMatchTheirTrees) {
  ParseResult r = parse_model_file(kModels / (GetParam() + ".sym"));
  for (const auto& d : r.diagnostics) ADD_FAILURE() << format_diagnostic(d);
  ASSERT_TRUE(r.ok());
  check_golden(kGolden / "sym" / ("model_" + GetParam() + ".tree"), dump_model(*r.model));
}

INSTANTIATE_TEST_SUITE_P(Models, ModelTrees, ::testing::Values("rdc", "rdc_hyp", "heat"));

class GoldenDiagnostics : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldenDiagnostics, ReportsTheExpectedErrors) {
  fs::path src = kGolden / "sym" / "errors" / (GetParam() + ".sym");
  ParseResult r = parse_golden(src);
  EXPECT_FALSE(r.ok());
  std::string text;
  for (const auto& d : r.diagnostics) text += format_diagnostic(d) + "\n";
  check_golden(kGolden / "sym" / "errors" / (GetParam() + ".diag"), text);
}

INSTANTIATE_TEST_SUITE_P(Errors, GoldenDiagnostics, ::testing::Values("unknown_symbol", "eps_in_exp"));

// The golden trees themselves are pinned against builder expressions here.
TEST(Parser, BasicAgreesWithBuilders) {
  ParseResult r = parse_golden(kGolden / "sym" / "basic.sym");
  ASSERT_TRUE(r.ok());
  Expr a = parameter("a");
  Expr b = parameter("b");
  Expr u = jet("u");
  Expr ut = jet("u", {"t"});
  Expr ux = jet("u", {"x"});
  EXPECT_EQ(r.model->equations[0].expr, normalize(ut - a * jet("u", {"x", "x"}) - b));
  EXPECT_EQ(r.model->equations[1].expr, normalize(ut - 2 * u * ux));
}

TEST(Parser, ApproxGeneratorOrders) {
  ParseResult r = parse_golden(kGolden / "sym" / "approx.sym");
  ASSERT_TRUE(r.ok());
  const GeneratorSpec& g = r.model->generators.at(0);
  ASSERT_EQ(g.orders.size(), 3u);
  // seeds are written in u, which stands for u[0]
  Expr u0 = jet("u", {}, 0);
  EXPECT_EQ(g.orders[0].eta.at("u"), normalize(parameter("a") * u0));
  EXPECT_EQ(g.orders[1].xi.at("x"), normalize(function("f", {variable("x")}) * pow(u0, 2)));
  EXPECT_EQ(g.orders[2].eta.at("u"), normalize(pow(u0, 3)));
  EXPECT_TRUE(r.model->solutions.at(0).ansatz);
}

TEST(Parser, Diagnostics) {
  auto first = [](const char* src) {
    ParseResult r = parse_model(src);
    return r.diagnostics.empty() ? std::string() : r.diagnostics[0].message;
  };
  EXPECT_NE(first("model m\nindep x\ndep u\nfunc f(x)\neq e: f(x,x) = 0\n").find("arity"), std::string::npos);
  EXPECT_NE(first("model m\nindep x\ndep u\nparams x\n").find("x"), std::string::npos);
  EXPECT_NE(first("model m\nindep x\ndep u\neq e: D(u,u) = 0\n").find("not an independent"), std::string::npos);
  ParseResult ok = parse_model("model m\nindep x\ndep u\neq e: D(u,x) = 0\n");
  EXPECT_TRUE(ok.ok());
  ParseOptions no_includes;
  no_includes.allow_includes = false;
  EXPECT_FALSE(parse_model("model m\ninclude \"x.sym\"\n", no_includes).ok());
}

TEST(Parser, IncludesAreReadOnce) {
  fs::path dir = fs::temp_directory_path() / "approxsym_cycle";
  fs::create_directories(dir);
  std::ofstream(dir / "a.sym") << "model a\nindep x\ndep u\ninclude \"b.sym\"\ninclude \"b.sym\"\n";
  std::ofstream(dir / "b.sym") << "include \"b.sym\"\ninclude \"a.sym\"\neq e: D(u,x) = 0\n";
  ParseResult r = parse_model_file(dir / "a.sym");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.model->equations.size(), 1u);
  fs::remove_all(dir);
}

TEST(Parser, NestedDenominatorsKeepTheirParentheses) {
  ModelSpec m = testing::random_model();
  Expr x = variable("x");
  Expr t = variable("t");
  for (const Expr& e : {t * pow(pow(x, -1), -1), t / (x * t), t * pow(number(Rational(3, 2)), -1)}) {
    ExpressionResult back = parse_expression(render(e), m.symbols);
    ASSERT_TRUE(back.expr.has_value()) << render(e);
    EXPECT_EQ(normalize(*back.expr), normalize(e)) << render(e);
  }
}

TEST(ParserProperty, RoundTripOfRandomTrees) {
  ModelSpec m = testing::random_model();
  RandomExpr rng(31);
  for (int i = 0; i < 500; ++i) {
    Expr e = rng();
    if (mentions(e, "eps")) continue;
    Expr canonical;
    try {
      canonical = normalize(e);
    } catch (const DomainError&) {
      continue;
    }
    for (const Expr& shown : {e, canonical}) {
      std::string text = render(shown);
      ExpressionResult back = parse_expression(text, m.symbols);
      ASSERT_TRUE(back.expr.has_value()) << text << "\n"
                                         << (back.diagnostics.empty() ? "" : format_diagnostic(back.diagnostics[0]));
      ASSERT_EQ(normalize(*back.expr), canonical) << text;
    }
  }
}

TEST(ParserProperty, RoundTripWithSmallParameter) {
  ModelSpec m = testing::random_model();
  RandomExprOptions opts;
  opts.special = false;
  opts.functions = false;
  opts.max_depth = 3;  // depth 4 occasionally expands to tens of kilobytes
  RandomExpr rng(32, opts);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    Expr e = normalize(rng());
    // eps may only appear polynomially
    try {
      series_coefficients(e, parameter("eps"), 2);
    } catch (const NonPolynomialError&) {
      continue;
    }
    ++checked;
    ExpressionResult back = parse_expression(render(e), m.symbols);
    ASSERT_TRUE(back.expr.has_value()) << render(e);
    ASSERT_EQ(normalize(*back.expr), e) << render(e);
  }
  EXPECT_GT(checked, 300);
}

TEST(ParserProperty, RandomBytesNeverCrash) {
  std::mt19937_64 rng(33);
  ParseOptions o;
  o.allow_includes = false;
  const std::string alphabet = "model params indep dep func eq gen sol def xi eta D u x t a ()[]{},:=+-*/^ 0123456789\n#\"";
  for (int i = 0; i < 100000; ++i) {
    std::string text(std::uniform_int_distribution<int>(0, 48)(rng), ' ');
    bool bytes = i % 2 == 0;
    for (char& c : text) {
      c = bytes ? static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng))
                : alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    }
    ParseResult r;
    ASSERT_NO_THROW(r = parse_model(text, o)) << i;
    if (!r.ok()) {
      ASSERT_FALSE(r.diagnostics.empty()) << i;
      for (const auto& d : r.diagnostics) {
        ASSERT_GE(d.span.line, 1);
        ASSERT_GE(d.span.column, 1);
      }
    }
  }
}

TEST(ParserProperty, MutatedModelsNeverCrash) {
  std::string base = read_file(kModels / "rdc.sym");
  std::mt19937_64 rng(34);
  ParseOptions o;
  o.allow_includes = false;
  for (int i = 0; i < 1000; ++i) {
    std::string text = base;
    for (int k = std::uniform_int_distribution<int>(1, 4)(rng); k > 0; --k) {
      std::size_t at = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
      switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
        case 0: text.erase(at, 1); break;
        case 1: text.insert(at, 1, "()*^,=:[]{}x0"[std::uniform_int_distribution<int>(0, 12)(rng)]); break;
        default: text[at] = static_cast<char>(std::uniform_int_distribution<int>(32, 126)(rng));
      }
    }
    ASSERT_NO_THROW(parse_model(text, o)) << text;
  }
}

}  // namespace
}  // namespace approxsym
