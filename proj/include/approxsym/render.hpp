#pragma once

#include <string>

#include "approxsym/expr.hpp"

namespace approxsym {

enum class Format { Plain, Latex };

/// Plain output is valid `.sym` expression syntax: parsing it back and
/// normalizing gives the same canonical tree.
std::string render(const Expr& e, Format format = Format::Plain);

/// Structural dump, one S-expression per node, e.g.
/// (Sum 1 (Product 2 (Parameter a))). Used for golden trees.
std::string tree_string(const Expr& e);

}  // namespace approxsym
