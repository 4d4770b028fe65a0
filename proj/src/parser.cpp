#include "approxsym/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "approxsym/jet.hpp"
#include "approxsym/normalize.hpp"
#include "approxsym/series.hpp"

namespace approxsym {

std::string format_diagnostic(const Diagnostic& d) {
  const char* level = d.severity == Diagnostic::Severity::Error     ? "error"
                      : d.severity == Diagnostic::Severity::Warning ? "warning"
                                                                    : "note";
  std::ostringstream out;
  out << (d.span.file.empty() ? "<input>" : d.span.file) << ':' << d.span.line << ':'
      << d.span.column << ": " << level << ": " << d.message;
  if (!d.hint.empty()) out << "\n    hint: " << d.hint;
  return out.str();
}

namespace {

constexpr std::array<std::string_view, 19> kKeywords = {
    "model", "params", "small", "indep", "dep", "func", "eq", "gen", "sol", "ansatz",
    "constraint", "def", "include", "unknowns", "order", "given", "for", "xi", "eta"};

constexpr std::array<std::string_view, 13> kItemKeywords = {
    "model", "params", "small", "indep", "dep", "func", "eq",
    "gen", "sol", "ansatz", "constraint", "def", "include"};

constexpr std::array<std::string_view, 6> kBuiltins = {"exp", "sin", "cos", "sqrt", "dawson", "D"};

constexpr int kMaxDepth = 256;
constexpr int kMaxIncludeDepth = 16;
constexpr int kMaxOrder = 16;

template <std::size_t N>
bool one_of(std::string_view s, const std::array<std::string_view, N>& set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

enum class Tok { Ident, Keyword, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
};

LexResult lex(std::string_view src, const std::string& file) {
  LexResult out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t start = i;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.text = std::string(src.substr(start, j - start));
      t.kind = one_of(t.text, kKeywords) ? Tok::Keyword : Tok::Ident;
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.text = std::string(src.substr(start, j - start));
      t.kind = Tok::Number;
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') {
        out.diagnostics.push_back({Diagnostic::Severity::Error,
                                   {file, line, col, static_cast<int>(j - i)},
                                   "unterminated string",
                                   "close the path with a double quote"});
        advance(j - i);
        continue;
      }
      t.text = std::string(src.substr(i + 1, j - i - 1));
      t.kind = Tok::String;
      advance(j + 1 - i);
    } else if (std::string_view("+-*/^()[]{},:=").find(static_cast<char>(c)) !=
               std::string_view::npos) {
      t.text = std::string(1, static_cast<char>(c));
      t.kind = Tok::Punct;
      advance(1);
    } else {
      std::string shown;
      if (c >= 0x20 && c < 0x7f) {
        shown = std::string(1, static_cast<char>(c));
      } else {
        std::ostringstream hex;
        hex << "byte 0x" << std::hex << static_cast<int>(c);
        shown = hex.str();
      }
      out.diagnostics.push_back({Diagnostic::Severity::Error,
                                 {file, line, col, 1},
                                 "unexpected character '" + shown + "'",
                                 ""});
      advance(1);
      continue;
    }
    out.tokens.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.tokens.push_back(end);
  return out;
}

// Thrown to abandon the current item after a diagnostic was recorded.
struct ItemError {};

struct Parsed {
  Expr expr;
  SourceSpan span;
  bool has_small = false;
};

class Parser {
 public:
  Parser(ModelSpec& model, std::vector<Diagnostic>& diags, std::set<std::string>& seen_files,
         bool allow_includes)
      : model_(model), diags_(diags), seen_files_(seen_files), allow_includes_(allow_includes) {}

  void parse_source(std::string_view src, const std::string& file,
                    const std::filesystem::path& base_dir, int include_depth) {
    LexResult lexed = lex(src, file);
    diags_.insert(diags_.end(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    tokens_ = std::move(lexed.tokens);
    pos_ = 0;
    file_ = file;
    base_dir_ = base_dir;
    include_depth_ = include_depth;
    while (peek().kind != Tok::End) {
      try {
        item();
      } catch (const ItemError&) {
        recover();
      }
    }
  }

  // Parses a bare expression; used for CLI input and round-trip tests.
  std::optional<Parsed> standalone_expression(std::string_view src) {
    LexResult lexed = lex(src, "<expr>");
    diags_.insert(diags_.end(), lexed.diagnostics.begin(), lexed.diagnostics.end());
    if (!lexed.diagnostics.empty()) return std::nullopt;
    tokens_ = std::move(lexed.tokens);
    pos_ = 0;
    file_ = "<expr>";
    try {
      Parsed p = expression();
      if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after expression");
      return p;
    } catch (const ItemError&) {
      return std::nullopt;
    }
  }

 private:
  // ---- token helpers ------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[k];
  }

  Token take() {
    Token t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  bool at_punct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }
  bool at_keyword(std::string_view k) const { return peek().kind == Tok::Keyword && peek().text == k; }

  SourceSpan span_of(const Token& t) const {
    int len = t.kind == Tok::End ? 0 : static_cast<int>(t.text.size());
    if (t.kind == Tok::String) len += 2;
    return {file_, t.line, t.column, len};
  }

  static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    if (b.line == a.line) s.length = std::max(a.length, b.column + b.length - a.column);
    return s;
  }

  [[noreturn]] void fail(const SourceSpan& span, std::string message, std::string hint = "") {
    diags_.push_back({Diagnostic::Severity::Error, span, std::move(message), std::move(hint)});
    throw ItemError{};
  }
  [[noreturn]] void fail(const Token& t, std::string message, std::string hint = "") {
    fail(span_of(t), std::move(message), std::move(hint));
  }

  void error(const SourceSpan& span, std::string message, std::string hint = "") {
    diags_.push_back({Diagnostic::Severity::Error, span, std::move(message), std::move(hint)});
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    if (t.kind == Tok::String) return "string \"" + t.text + "\"";
    return "'" + t.text + "'";
  }

  void expect_punct(char c) {
    if (!at_punct(c)) fail(peek(), std::string("expected '") + c + "', found " + describe(peek()));
    take();
  }

  Token expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) {
      std::string hint = peek().kind == Tok::Keyword ? "'" + peek().text + "' is a reserved word" : "";
      fail(peek(), std::string("expected ") + what + ", found " + describe(peek()), hint);
    }
    return take();
  }

  int expect_small_int(const char* what) {
    if (peek().kind != Tok::Number || peek().text.find('.') != std::string::npos ||
        peek().text.size() > 3) {
      fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    }
    return std::stoi(take().text);
  }

  void recover() {
    // skip at least one token, then up to the next item keyword
    if (peek().kind != Tok::End) take();
    while (peek().kind != Tok::End &&
           !(peek().kind == Tok::Keyword && one_of(peek().text, kItemKeywords))) {
      take();
    }
  }

  // ---- items ---------------------------------------------------------------

  void item() {
    const Token& t = peek();
    if (t.kind != Tok::Keyword || !one_of(t.text, kItemKeywords)) {
      fail(t, "expected a declaration, found " + describe(t),
           "items start with model, params, small, indep, dep, func, eq, gen, sol, ansatz, "
           "constraint, def or include");
    }
    std::string k = take().text;
    if (k == "model") {
      model_.name = expect_ident("a model name").text;
    } else if (k == "params") {
      declare_names(SymbolKind::Parameter, "parameter name");
    } else if (k == "small") {
      small_decl();
    } else if (k == "indep") {
      declare_names(SymbolKind::Independent, "independent variable name");
    } else if (k == "dep") {
      declare_names(SymbolKind::Dependent, "dependent variable name");
    } else if (k == "func") {
      func_decl();
    } else if (k == "eq") {
      eq_item();
    } else if (k == "constraint") {
      constraint_item();
    } else if (k == "gen") {
      gen_item();
    } else if (k == "sol" || k == "ansatz") {
      sol_item(k == "ansatz");
    } else if (k == "def") {
      def_item();
    } else if (k == "include") {
      include_item();
    }
  }

  void declare_one(const Token& name, SymbolKind kind) {
    if (one_of(name.text, kBuiltins)) fail(name, "'" + name.text + "' is a builtin function name");
    if (!model_.symbols.declare(name.text, kind)) {
      fail(name, "duplicate declaration of '" + name.text + "'",
           "names must be unique across parameters, variables and functions");
    }
  }

  void declare_names(SymbolKind kind, const char* what) {
    declare_one(expect_ident(what), kind);
    while (peek().kind == Tok::Ident) declare_one(take(), kind);
  }

  void small_decl() {
    Token name = expect_ident("small parameter name");
    if (model_.symbols.small()) {
      fail(name, "a small parameter is already declared ('" + *model_.symbols.small() + "')");
    }
    declare_one(name, SymbolKind::Small);
    if (at_keyword("order")) {
      take();
      model_.order = expect_small_int("perturbation order");
      if (model_.order > kMaxOrder) fail(peek(), "perturbation order is too large");
    }
  }

  void func_decl() {
    do {
      Token name = expect_ident("function name");
      FunctionSignature sig{name.text, {}};
      expect_punct('(');
      do {
        Token a = expect_ident("argument variable");
        auto kind = model_.symbols.lookup(a.text);
        if (kind != SymbolKind::Independent && kind != SymbolKind::Dependent) {
          fail(a, "function argument '" + a.text + "' is not a declared variable");
        }
        sig.args.push_back(a.text);
      } while (at_punct(',') && (take(), true));
      expect_punct(')');
      if (one_of(name.text, kBuiltins)) fail(name, "'" + name.text + "' is a builtin function name");
      if (!model_.symbols.declare_function(sig)) {
        fail(name, "duplicate declaration of '" + name.text + "'");
      }
    } while (peek().kind == Tok::Ident);
  }

  template <typename T>
  void check_unique(const std::vector<T>& items, const Token& name, const char* what) {
    for (const auto& i : items) {
      if (i.name == name.text) fail(name, std::string("duplicate ") + what + " '" + name.text + "'");
    }
  }

  std::vector<std::string> given_clause() {
    std::vector<std::string> names;
    if (!at_punct('[')) return names;
    take();
    if (!at_keyword("given")) fail(peek(), "expected 'given' after '['");
    take();
    do {
      names.push_back(expect_ident("constraint name").text);
    } while (at_punct(',') && (take(), true));
    expect_punct(']');
    return names;
  }

  Expr canonical(const Parsed& p) {
    try {
      return normalize(p.expr);
    } catch (const DomainError& e) {
      fail(p.span, e.what());
    }
  }

  void require_small_polynomial(const Parsed& p) {
    if (!p.has_small) return;
    try {
      (void)series_coefficients(canonical(p), model_.symbols.small_symbol(), 0);
    } catch (const NonPolynomialError& e) {
      fail(p.span, e.what(), "the small parameter may only appear polynomially");
    }
  }

  void eq_item() {
    Token name = expect_ident("equation name");
    check_unique(model_.equations, name, "equation");
    expect_punct(':');
    Parsed lhs = expression();
    expect_punct('=');
    Parsed rhs = expression();
    Parsed diff{lhs.expr - rhs.expr, join(lhs.span, rhs.span), lhs.has_small || rhs.has_small};
    require_small_polynomial(diff);
    model_.equations.push_back({name.text, canonical(diff), span_of(name)});
  }

  void constraint_item() {
    Token name = expect_ident("constraint name");
    check_unique(model_.constraints, name, "constraint");
    expect_punct(':');
    Parsed lhs = expression();
    expect_punct('=');
    Parsed rhs = expression();
    if (lhs.has_small || rhs.has_small) {
      fail(join(lhs.span, rhs.span), "constraints may not involve the small parameter");
    }
    Constraint c;
    c.name = name.text;
    c.expr = canonical({lhs.expr - rhs.expr, join(lhs.span, rhs.span), false});
    c.span = span_of(name);
    c.on_functions = !functions_in(c.expr).empty();
    if (!jets_in(c.expr).empty()) {
      fail(join(lhs.span, rhs.span), "constraints may not involve dependent variables");
    }
    if (at_keyword("for")) {
      take();
      Token target = expect_ident("parameter name");
      if (c.on_functions) fail(target, "'for' applies to parameter relations only");
      if (model_.symbols.lookup(target.text) != SymbolKind::Parameter) {
        fail(target, "'" + target.text + "' is not a declared parameter");
      }
      if (!solve_linear(c.expr, parameter(target.text))) {
        fail(target, "constraint is not linear in '" + target.text + "'");
      }
      c.solve_for = target.text;
    } else if (!c.on_functions) {
      for (const auto& p : model_.symbols.parameters()) {
        if (mentions(c.expr, p) && solve_linear(c.expr, parameter(p))) {
          c.solve_for = p;
          break;
        }
      }
      if (c.solve_for.empty()) {
        fail(c.span, "constraint '" + c.name + "' is not linear in any parameter",
             "add 'for NAME' or rewrite the relation");
      }
    }
    model_.constraints.push_back(std::move(c));
  }

  // In approximate models generator seeds are written in terms of u, meaning u[0].
  Expr seed_form(const Parsed& p) {
    if (p.has_small) fail(p.span, "generator components may not involve the small parameter",
                          "write higher orders in 'order k' blocks");
    if (!model_.approximate()) return canonical(p);
    Bindings b;
    for (const auto& j : jets_in(p.expr)) {
      if (j->index > 0) fail(p.span, "generator seeds depend on zeroth-order coefficients only");
      if (j->index < 0) b.emplace(j, jet(j->name, j->wrt, 0));
    }
    return canonical({replace(p.expr, b), p.span, false});
  }

  void component(GeneratorOrder& order) {
    if (!at_keyword("xi") && !at_keyword("eta")) {
      fail(peek(), "expected xi[...] or eta[...], found " + describe(peek()));
    }
    bool is_xi = take().text == "xi";
    expect_punct('[');
    Token var = expect_ident("variable name");
    auto kind = model_.symbols.lookup(var.text);
    if (is_xi && kind != SymbolKind::Independent) {
      fail(var, "'" + var.text + "' is not an independent variable");
    }
    if (!is_xi && kind != SymbolKind::Dependent) {
      fail(var, "'" + var.text + "' is not a dependent variable");
    }
    expect_punct(']');
    expect_punct('=');
    Parsed value = expression();
    if (!jets_of_positive_order(value.expr).empty()) {
      fail(value.span, "infinitesimals may not depend on derivatives");
    }
    auto& slot = is_xi ? order.xi : order.eta;
    if (slot.count(var.text)) fail(var, "component given twice");
    slot[var.text] = seed_form(value);
  }

  static std::vector<Expr> jets_of_positive_order(const Expr& e) {
    std::vector<Expr> out;
    for (const auto& j : jets_in(e)) {
      if (!j->wrt.empty()) out.push_back(j);
    }
    return out;
  }

  void components(GeneratorOrder& order) {
    component(order);
    while (at_punct(',')) {
      take();
      component(order);
    }
  }

  void gen_item() {
    Token name = expect_ident("generator name");
    check_unique(model_.generators, name, "generator");
    GeneratorSpec g;
    g.name = name.text;
    g.span = span_of(name);
    g.given = given_clause();
    expect_punct(':');
    g.orders.emplace_back();
    components(g.orders[0]);
    while (at_keyword("order")) {
      Token kw = take();
      if (!model_.approximate()) {
        fail(kw, "'order' blocks need a small parameter", "declare one with 'small NAME'");
      }
      int k = expect_small_int("order number");
      if (k != static_cast<int>(g.orders.size())) {
        fail(kw, "expected 'order " + std::to_string(g.orders.size()) + "'",
             "order blocks are numbered consecutively from 1");
      }
      if (k > kMaxOrder) fail(kw, "order is too large");
      if (at_punct(':')) take();
      g.orders.emplace_back();
      components(g.orders.back());
    }
    model_.generators.push_back(std::move(g));
  }

  void sol_item(bool ansatz) {
    Token name = expect_ident("solution name");
    check_unique(model_.solutions, name, "solution");
    SolutionSpec s;
    s.name = name.text;
    s.span = span_of(name);
    s.ansatz = ansatz;
    s.given = given_clause();
    expect_punct(':');
    do {
      Token dep = expect_ident("dependent variable");
      if (model_.symbols.lookup(dep.text) != SymbolKind::Dependent) {
        fail(dep, "'" + dep.text + "' is not a dependent variable");
      }
      if (s.values.count(dep.text)) fail(dep, "value given twice");
      expect_punct('=');
      Parsed v = expression();
      require_small_polynomial(v);
      if (!jets_in(v.expr).empty()) fail(v.span, "a solution may not refer to dependent variables");
      s.values[dep.text] = canonical(v);
    } while (at_punct(',') && (take(), true));
    if (ansatz) {
      if (!at_keyword("unknowns")) fail(peek(), "expected 'unknowns' after an ansatz");
      take();
      do {
        Token u = expect_ident("unknown constant");
        if (model_.symbols.lookup(u.text) != SymbolKind::Parameter) {
          fail(u, "unknown '" + u.text + "' must be a declared parameter");
        }
        s.unknowns.push_back(u.text);
      } while (peek().kind == Tok::Ident);
    }
    model_.solutions.push_back(std::move(s));
  }

  void def_item() {
    Token name = expect_ident("definition name");
    check_unique(model_.definitions, name, "definition");
    DefinitionSpec d;
    d.name = name.text;
    d.span = span_of(name);
    d.given = given_clause();
    expect_punct(':');
    Token fn = expect_ident("function name");
    const FunctionSignature* sig = model_.symbols.function(fn.text);
    if (!sig) fail(fn, "'" + fn.text + "' is not a declared function");
    d.definition.name = fn.text;
    if (at_punct('[')) {
      take();
      d.definition.family = expect_small_int("family index");
      expect_punct(']');
    }
    expect_punct('(');
    std::vector<std::string> formal_names;
    do {
      Token a = expect_ident("argument variable");
      auto kind = model_.symbols.lookup(a.text);
      if (kind != SymbolKind::Independent && kind != SymbolKind::Dependent) {
        fail(a, "definition arguments must be independent or dependent variables");
      }
      if (std::find(formal_names.begin(), formal_names.end(), a.text) != formal_names.end()) {
        fail(a, "repeated argument '" + a.text + "'");
      }
      formal_names.push_back(a.text);
      d.definition.formals.push_back(kind == SymbolKind::Dependent ? jet(a.text) : variable(a.text));
    } while (at_punct(',') && (take(), true));
    expect_punct(')');
    if (formal_names.size() != sig->args.size()) {
      fail(fn, "'" + fn.text + "' takes " + std::to_string(sig->args.size()) + " argument(s)");
    }
    expect_punct('=');
    Parsed body = expression();
    if (body.has_small) fail(body.span, "definitions may not involve the small parameter");
    for (const Expr& j : jets_in(body.expr)) {
      if (std::find(d.definition.formals.begin(), d.definition.formals.end(), j) == d.definition.formals.end()) {
        fail(body.span, "definitions may only mention dependent variables that are arguments");
      }
    }
    d.definition.body = canonical(body);
    model_.definitions.push_back(std::move(d));
  }

  void include_item() {
    if (peek().kind != Tok::String) fail(peek(), "expected a quoted path after 'include'");
    Token path_tok = take();
    if (!allow_includes_) fail(path_tok, "includes are disabled for this input");
    if (include_depth_ >= kMaxIncludeDepth) fail(path_tok, "includes nested too deeply");
    std::filesystem::path path = base_dir_ / path_tok.text;
    std::error_code ec;
    auto canonical = std::filesystem::weakly_canonical(path, ec);
    if (ec || !std::filesystem::is_regular_file(canonical, ec)) {
      fail(path_tok, "cannot open included file '" + path_tok.text + "'");
    }
    if (!seen_files_.insert(canonical.string()).second) return;  // include once
    std::ifstream in(canonical, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    // The nested parse reuses this parser's state; save and restore our cursor.
    auto saved_tokens = std::move(tokens_);
    auto saved_pos = pos_;
    auto saved_file = file_;
    auto saved_dir = base_dir_;
    auto saved_depth = include_depth_;
    parse_source(text, path.lexically_normal().string(), canonical.parent_path(), include_depth_ + 1);
    tokens_ = std::move(saved_tokens);
    pos_ = saved_pos;
    file_ = std::move(saved_file);
    base_dir_ = std::move(saved_dir);
    include_depth_ = saved_depth;
  }

  // ---- expressions -----------------------------------------------------------

  struct DepthGuard {
    int& depth;
    explicit DepthGuard(int& d) : depth(d) { ++depth; }
    ~DepthGuard() { --depth; }
  };

  void enter(const Token& at) {
    if (depth_ >= kMaxDepth) fail(at, "expression nested too deeply");
  }

  Parsed expression() {
    enter(peek());
    DepthGuard guard(depth_);
    Parsed left = term();
    std::vector<Expr> terms{left.expr};
    SourceSpan span = left.span;
    bool has_small = left.has_small;
    while (at_punct('+') || at_punct('-')) {
      bool minus = take().text == "-";
      Parsed right = term();
      terms.push_back(minus ? -right.expr : right.expr);
      span = join(span, right.span);
      has_small = has_small || right.has_small;
    }
    return {sum(std::move(terms)), span, has_small};
  }

  Parsed term() {
    Parsed left = unary();
    std::vector<Expr> factors{left.expr};
    SourceSpan span = left.span;
    bool has_small = left.has_small;
    while (at_punct('*') || at_punct('/')) {
      bool divide = take().text == "/";
      Parsed right = unary();
      if (divide) {
        if (right.has_small) {
          fail(right.span, "small parameter in a denominator",
               "the small parameter may only appear polynomially");
        }
        if (right.expr.is_number(0)) fail(right.span, "division by zero");
        factors.push_back(pow(right.expr, -1));
      } else {
        factors.push_back(right.expr);
      }
      span = join(span, right.span);
      has_small = has_small || right.has_small;
    }
    return {product(std::move(factors)), span, has_small};
  }

  Parsed unary() {
    if (at_punct('-') || at_punct('+')) {
      Token op = take();
      enter(op);
      DepthGuard guard(depth_);
      Parsed inner = unary();
      return {op.text == "-" ? -inner.expr : inner.expr, join(span_of(op), inner.span),
              inner.has_small};
    }
    return power();
  }

  Parsed power() {
    Parsed base = primary();
    if (!at_punct('^')) return base;
    Token caret = take();
    enter(caret);
    DepthGuard guard(depth_);
    Parsed ex = unary();
    Expr value;
    try {
      value = normalize(ex.expr);
    } catch (const DomainError& e) {
      fail(ex.span, e.what());
    }
    if (!value.is_number()) fail(ex.span, "exponent must be a rational constant");
    const Rational& r = value.number();
    if (base.has_small && (!is_integer(r) || r < 0)) {
      fail(join(base.span, ex.span), "small parameter under a non-polynomial power",
           "the small parameter may only appear polynomially");
    }
    if (abs(r.get_num()) > 1000 || r.get_den() > 1000) fail(ex.span, "exponent is too large");
    return {pow(base.expr, r), join(base.span, ex.span), base.has_small};
  }

  std::vector<Parsed> call_args() {
    expect_punct('(');
    std::vector<Parsed> args;
    if (at_punct(')')) fail(peek(), "expected an argument");
    do {
      args.push_back(expression());
    } while (at_punct(',') && (take(), true));
    expect_punct(')');
    return args;
  }

  Parsed primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      Token num = take();
      auto r = parse_rational(num.text);
      if (!r) fail(num, "malformed number '" + num.text + "'");
      return {number(*r), span_of(num), false};
    }
    if (at_punct('(')) {
      Token open = take();
      Parsed inner = expression();
      Token close = peek();
      expect_punct(')');
      return {inner.expr, join(span_of(open), span_of(close)), inner.has_small};
    }
    if (t.kind != Tok::Ident) {
      fail(t, "expected an expression, found " + describe(t));
    }
    Token name = take();
    if (name.text == "D") return derivative(name);
    if (one_of(name.text, kBuiltins)) return builtin(name);
    auto kind = model_.symbols.lookup(name.text);
    if (!kind) {
      fail(name, "unknown symbol " + name.text, "declare it with params, indep, dep or func");
    }
    switch (*kind) {
      case SymbolKind::Parameter: return {parameter(name.text), span_of(name), false};
      case SymbolKind::Small: return {parameter(name.text), span_of(name), true};
      case SymbolKind::Independent: return {variable(name.text), span_of(name), false};
      case SymbolKind::Dependent: {
        int k = -1;
        SourceSpan span = span_of(name);
        if (at_punct('[')) {
          take();
          k = expect_small_int("expansion order");
          Token close = peek();
          expect_punct(']');
          span = join(span, span_of(close));
        }
        return {jet(name.text, {}, k), span, false};
      }
      case SymbolKind::Function: return function_call(name);
    }
    fail(name, "unknown symbol " + name.text);
  }

  Parsed builtin(const Token& name) {
    std::vector<Parsed> args = call_args();
    if (args.size() != 1) {
      fail(name, name.text + " takes exactly one argument");
    }
    const Parsed& a = args[0];
    if (a.has_small) {
      fail(a.span, "small parameter inside " + name.text,
           "the small parameter may only appear polynomially");
    }
    Expr e;
    if (name.text == "exp") e = exp(a.expr);
    else if (name.text == "sin") e = sin(a.expr);
    else if (name.text == "cos") e = cos(a.expr);
    else if (name.text == "sqrt") e = sqrt(a.expr);
    else e = function(name.text, {a.expr});
    return {e, join(span_of(name), a.span), false};
  }

  Parsed derivative(const Token& name) {
    expect_punct('(');
    Parsed body = expression();
    std::vector<std::string> vars;
    if (!at_punct(',')) fail(peek(), "D needs at least one variable", "write D(expr, x, ...)");
    while (at_punct(',')) {
      take();
      Token v = expect_ident("independent variable");
      auto kind = model_.symbols.lookup(v.text);
      if (!kind) fail(v, "unknown symbol " + v.text, "declare it with indep");
      if (*kind != SymbolKind::Independent) {
        fail(v, "'" + v.text + "' is not an independent variable");
      }
      vars.push_back(v.text);
      if (vars.size() > 12) fail(v, "derivative order is too high");
    }
    Token close = peek();
    expect_punct(')');
    Expr e = body.expr;
    if (e.kind() == Kind::Jet) {
      // keep the tree as written for plain coordinates
      std::vector<std::string> wrt = e->wrt;
      wrt.insert(wrt.end(), vars.begin(), vars.end());
      e = jet(e->name, std::move(wrt), e->index);
    } else {
      try {
        for (const auto& v : vars) e = total_derivative(e, v);
      } catch (const DomainError& err) {
        fail(body.span, err.what());
      }
    }
    return {e, join(span_of(name), span_of(close)), body.has_small};
  }

  Parsed function_call(const Token& name) {
    const FunctionSignature* sig = model_.symbols.function(name.text);
    int family = -1;
    if (at_punct('[')) {
      take();
      family = expect_small_int("family index");
      expect_punct(']');
    }
    std::vector<int> partials;
    if (at_punct('{')) {
      take();
      do {
        partials.push_back(expect_small_int("derivative count"));
        if (partials.back() > 12) fail(peek(), "derivative order is too high");
      } while (at_punct(',') && (take(), true));
      expect_punct('}');
    }
    Token open = peek();
    std::vector<Parsed> args = call_args();
    if (args.size() != sig->args.size()) {
      fail(join(span_of(name), span_of(open)),
           "arity mismatch: '" + name.text + "' takes " + std::to_string(sig->args.size()) +
               " argument(s), got " + std::to_string(args.size()));
    }
    if (!partials.empty() && partials.size() != args.size()) {
      fail(name, "derivative counts do not match the arity of '" + name.text + "'");
    }
    std::vector<Expr> values;
    SourceSpan span = span_of(name);
    for (const auto& a : args) {
      if (a.has_small) {
        fail(a.span, "small parameter inside a function argument",
             "the small parameter may only appear polynomially");
      }
      values.push_back(a.expr);
      span = join(span, a.span);
    }
    return {function(name.text, std::move(values), std::move(partials), family), span, false};
  }

  ModelSpec& model_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string>& seen_files_;
  bool allow_includes_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string file_;
  std::filesystem::path base_dir_;
  int include_depth_ = 0;
  int depth_ = 0;
};

void validate(ModelSpec& model, std::vector<Diagnostic>& diags) {
  auto check_given = [&](const std::vector<std::string>& given, const SourceSpan& span) {
    for (const auto& g : given) {
      if (!model.find_constraint(g)) {
        diags.push_back({Diagnostic::Severity::Error, span, "unknown constraint '" + g + "'",
                         "declare it with 'constraint " + g + ": ...'"});
      }
    }
  };
  for (const auto& g : model.generators) check_given(g.given, g.span);
  for (const auto& s : model.solutions) check_given(s.given, s.span);
  for (const auto& d : model.definitions) check_given(d.given, d.span);
}

}  // namespace

ParseResult parse_model(std::string_view source, const ParseOptions& options) {
  ParseResult result;
  ModelSpec model;
  std::set<std::string> seen;
  std::error_code ec;
  if (options.filename != "<input>") {
    auto canonical = std::filesystem::weakly_canonical(options.base_dir / std::filesystem::path(options.filename).filename(), ec);
    if (!ec) seen.insert(canonical.string());
  }
  Parser parser(model, result.diagnostics, seen, options.allow_includes);
  parser.parse_source(source, options.filename, options.base_dir, 0);
  if (result.diagnostics.empty()) validate(model, result.diagnostics);
  bool errors = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                            [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
  if (!errors) result.model = std::move(model);
  return result;
}

ParseResult parse_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Diagnostic::Severity::Error, {path.string(), 0, 0, 0},
                             "cannot open model file", ""});
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  ParseOptions options;
  options.filename = path.string();
  std::error_code ec;
  auto canonical = std::filesystem::weakly_canonical(path, ec);
  options.base_dir = ec ? path.parent_path() : canonical.parent_path();
  return parse_model(buf.str(), options);
}

ExpressionResult parse_expression(std::string_view text, const SymbolTable& symbols) {
  ExpressionResult result;
  ModelSpec scratch;
  scratch.symbols = symbols;
  std::set<std::string> seen;
  Parser parser(scratch, result.diagnostics, seen, false);
  if (auto p = parser.standalone_expression(text)) result.expr = p->expr;
  return result;
}

}  // namespace approxsym
