#include "approxsym/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace approxsym {

bool SymbolTable::declare(const std::string& name, SymbolKind kind) {
  if (!kinds_.emplace(name, kind).second) return false;
  switch (kind) {
    case SymbolKind::Parameter: parameters_.push_back(name); break;
    case SymbolKind::Small: small_ = name; break;
    case SymbolKind::Independent: independents_.push_back(name); break;
    case SymbolKind::Dependent: dependents_.push_back(name); break;
    case SymbolKind::Function: break;
  }
  return true;
}

bool SymbolTable::declare_function(FunctionSignature sig) {
  if (!declare(sig.name, SymbolKind::Function)) return false;
  functions_.push_back(std::move(sig));
  return true;
}

std::optional<SymbolKind> SymbolTable::lookup(const std::string& name) const {
  auto it = kinds_.find(name);
  if (it == kinds_.end()) return std::nullopt;
  return it->second;
}

const FunctionSignature* SymbolTable::function(const std::string& name) const {
  for (const auto& f : functions_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

Expr SymbolTable::small_symbol() const {
  if (!small_) throw std::logic_error("model declares no small parameter");
  return parameter(*small_);
}

namespace {
template <typename T>
const T* find_named(const std::vector<T>& items, const std::string& n) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& i) { return i.name == n; });
  return it == items.end() ? nullptr : &*it;
}
}  // namespace

const GeneratorSpec* ModelSpec::find_generator(const std::string& n) const {
  return find_named(generators, n);
}
const SolutionSpec* ModelSpec::find_solution(const std::string& n) const {
  return find_named(solutions, n);
}
const Constraint* ModelSpec::find_constraint(const std::string& n) const {
  return find_named(constraints, n);
}
const DefinitionSpec* ModelSpec::find_definition(const std::string& n) const {
  return find_named(definitions, n);
}

int ModelSpec::differential_order() const {
  int r = 0;
  for (const auto& eq : equations) {
    for (const auto& j : jets_in(eq.expr)) r = std::max(r, static_cast<int>(jet_order(j)));
  }
  return r;
}

}  // namespace approxsym
