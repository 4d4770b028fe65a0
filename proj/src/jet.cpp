#include "approxsym/jet.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "approxsym/normalize.hpp"

namespace approxsym {

int total_order(const MultiIndex& s) { return std::accumulate(s.begin(), s.end(), 0); }

std::vector<MultiIndex> multi_indices(std::size_t n, int r) {
  std::vector<MultiIndex> out;
  std::function<void(MultiIndex&, std::size_t, int)> fill = [&](MultiIndex& s, std::size_t i,
                                                                 int left) {
    if (i + 1 == n) {
      s[i] = left;
      out.push_back(s);
      return;
    }
    for (int c = left; c >= 0; --c) {
      s[i] = c;
      fill(s, i + 1, left - c);
    }
  };
  if (n == 0) return out;
  for (int order = 1; order <= r; ++order) {
    MultiIndex s(n, 0);
    fill(s, 0, order);
  }
  return out;
}

Expr JetCoordinate::to_expr(const std::vector<std::string>& independents) const {
  std::vector<std::string> wrt;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int c = 0; c < counts[i]; ++c) wrt.push_back(independents.at(i));
  }
  return jet(dependent, std::move(wrt), expansion);
}

JetCoordinate coordinate_of(const Expr& j, const std::vector<std::string>& independents) {
  if (j.kind() != Kind::Jet) throw std::invalid_argument("not a jet coordinate");
  JetCoordinate c{j->name, MultiIndex(independents.size(), 0), j->index};
  for (const auto& w : j->wrt) {
    auto it = std::find(independents.begin(), independents.end(), w);
    if (it == independents.end()) throw std::invalid_argument("unknown independent variable " + w);
    ++c.counts[static_cast<std::size_t>(it - independents.begin())];
  }
  return c;
}

Expr total_derivative(const Expr& e, const std::string& var) {
  Derivation d;
  d.atom = [&](const Expr& a) -> std::optional<Expr> {
    switch (a.kind()) {
      case Kind::Variable: return Expr(a->name == var ? 1 : 0);
      case Kind::Parameter: return Expr();
      case Kind::Jet: {
        std::vector<std::string> wrt = a->wrt;
        wrt.push_back(var);
        return jet(a->name, std::move(wrt), a->index);
      }
      default: return std::nullopt;
    }
  };
  return derive(e, d);
}

std::map<MultiIndex, Expr> prolong_component(
    const std::vector<std::string>& independents, const std::vector<Expr>& xi, const Expr& eta,
    int r, const std::function<Expr(const MultiIndex&)>& coordinate,
    const std::function<Expr(const Expr&)>& post) {
  const std::size_t n = independents.size();
  std::vector<std::vector<Expr>> dxi(n, std::vector<Expr>(n));  // D_i xi_j
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dxi[i][j] = total_derivative(xi[j], independents[i]);
  }
  std::map<MultiIndex, Expr> out;
  out.emplace(MultiIndex(n, 0), normalize(eta));
  for (const auto& s : multi_indices(n, r)) {
    // step from s - e_i with i the last non-zero entry
    std::size_t i = n;
    while (i > 0 && s[i - 1] == 0) --i;
    --i;
    MultiIndex prev = s;
    --prev[i];
    Expr value = total_derivative(out.at(prev), independents[i]);
    std::vector<Expr> terms{value};
    for (std::size_t j = 0; j < n; ++j) {
      if (dxi[i][j].is_number(0)) continue;
      MultiIndex next = prev;
      ++next[j];
      terms.push_back(-(dxi[i][j] * coordinate(next)));
    }
    Expr coeff = normalize(sum(std::move(terms)));
    out.emplace(s, post ? post(coeff) : coeff);
  }
  out.erase(MultiIndex(n, 0));
  return out;
}

Prolongation prolong(const Generator& g, int r) {
  Prolongation out;
  for (std::size_t a = 0; a < g.dependents.size(); ++a) {
    const std::string& dep = g.dependents[a];
    auto coordinate = [&](const MultiIndex& s) {
      return JetCoordinate{dep, s, -1}.to_expr(g.independents);
    };
    for (auto& [s, value] : prolong_component(g.independents, g.xi, g.eta[a], r, coordinate, {})) {
      out.emplace(JetCoordinate{dep, s, -1}.to_expr(g.independents), value);
    }
  }
  return out;
}

Expr apply_generator(const Generator& g, const Prolongation& prolonged, const Expr& e) {
  Derivation d;
  d.atom = [&](const Expr& a) -> std::optional<Expr> {
    switch (a.kind()) {
      case Kind::Variable: {
        auto it = std::find(g.independents.begin(), g.independents.end(), a->name);
        if (it == g.independents.end()) return Expr();
        return g.xi[static_cast<std::size_t>(it - g.independents.begin())];
      }
      case Kind::Parameter: return Expr();
      case Kind::Jet: {
        if (a->wrt.empty()) {
          auto it = std::find(g.dependents.begin(), g.dependents.end(), a->name);
          if (it == g.dependents.end()) return Expr();
          return g.eta[static_cast<std::size_t>(it - g.dependents.begin())];
        }
        auto it = prolonged.find(a);
        if (it == prolonged.end()) {
          throw std::out_of_range("prolongation does not reach " + a->name);
        }
        return it->second;
      }
      default: return std::nullopt;
    }
  };
  return derive(e, d);
}

}  // namespace approxsym
