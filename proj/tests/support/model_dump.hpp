#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "approxsym/model.hpp"
#include "approxsym/render.hpp"

namespace approxsym::testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every expression of the model, one canonical tree per line.
inline std::string dump_model(const ModelSpec& m) {
  std::ostringstream out;
  out << "model " << m.name << "\n";
  const SymbolTable& s = m.symbols;
  for (const auto& p : s.parameters()) out << "param " << p << "\n";
  if (s.small()) out << "small " << *s.small() << " order " << m.order << "\n";
  for (const auto& v : s.independents()) out << "indep " << v << "\n";
  for (const auto& v : s.dependents()) out << "dep " << v << "\n";
  for (const auto& f : s.functions()) {
    out << "func " << f.name;
    for (const auto& a : f.args) out << " " << a;
    out << "\n";
  }
  for (const auto& e : m.equations) out << "eq " << e.name << " " << tree_string(e.expr) << "\n";
  for (const auto& c : m.constraints) {
    out << "constraint " << c.name << (c.on_functions ? " functions" : " for " + c.solve_for) << " "
        << tree_string(c.expr) << "\n";
  }
  for (const auto& g : m.generators) {
    out << "gen " << g.name;
    for (const auto& n : g.given) out << " given:" << n;
    out << "\n";
    for (std::size_t k = 0; k < g.orders.size(); ++k) {
      for (const auto& [v, e] : g.orders[k].xi) out << "  " << k << " xi " << v << " " << tree_string(e) << "\n";
      for (const auto& [v, e] : g.orders[k].eta) out << "  " << k << " eta " << v << " " << tree_string(e) << "\n";
    }
  }
  for (const auto& sol : m.solutions) {
    out << (sol.ansatz ? "ansatz " : "sol ") << sol.name;
    for (const auto& n : sol.given) out << " given:" << n;
    for (const auto& n : sol.unknowns) out << " unknown:" << n;
    out << "\n";
    for (const auto& [v, e] : sol.values) out << "  " << v << " " << tree_string(e) << "\n";
  }
  for (const auto& d : m.definitions) {
    out << "def " << d.name << " " << d.definition.name;
    for (const auto& f : d.definition.formals) out << " " << tree_string(f);
    out << " = " << tree_string(d.definition.body) << "\n";
  }
  return out.str();
}

}  // namespace approxsym::testing
