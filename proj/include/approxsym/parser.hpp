#pragma once

// Reader for the `.sym` model language. See README.md for the grammar.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "approxsym/model.hpp"

namespace approxsym {

struct Diagnostic {
  enum class Severity { Error, Warning, Note };
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;
  std::string hint;
};

/// `file:line:col: error: message` plus an indented hint line when present.
std::string format_diagnostic(const Diagnostic& d);

struct ParseOptions {
  std::string filename = "<input>";
  std::filesystem::path base_dir;  // for relative includes
  bool allow_includes = true;
};

struct ParseResult {
  std::optional<ModelSpec> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

ParseResult parse_model(std::string_view source, const ParseOptions& options = {});
ParseResult parse_model_file(const std::filesystem::path& path);

struct ExpressionResult {
  std::optional<Expr> expr;
  std::vector<Diagnostic> diagnostics;
};

/// Parses a single expression against existing declarations. The result is
/// the tree as written (not normalized).
ExpressionResult parse_expression(std::string_view text, const SymbolTable& symbols);

}  // namespace approxsym
