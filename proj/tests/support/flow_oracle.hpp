#pragma once

// Closed-form flows of point generators, used to check prolongation
// numerically without the prolongation formula.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "approxsym/jet.hpp"
#include "approxsym/normalize.hpp"
#include "approxsym/numeric.hpp"

namespace approxsym::testing {

namespace flow_symbols {
inline const Expr t = variable("t");
inline const Expr x = variable("x");
inline const Expr u = jet("u");
}  // namespace flow_symbols

// For each generator the one-parameter group is known in closed form. The
// transformed function psi_s is computed by inverting the flow on the graph
// of a test function phi; then d/ds D_J psi_s at s = 0 plus xi . grad(phi_J)
// must equal the prolonged coefficient eta^J evaluated on phi.

using Point = std::array<long double, 3>;  // t, x, u
using Flow = std::function<Point(const Point&, long double)>;

struct FlowCase {
  const char* name;
  Expr xi_t;
  Expr xi_x;
  Expr eta;
  Flow flow;
};

inline std::vector<FlowCase> flow_cases() {
  using namespace flow_symbols;
  using std::exp;
  using std::sqrt;
  return {
      {"time shift", number(1), number(0), number(0), [](const Point& p, long double s) { return Point{p[0] + s, p[1], p[2]}; }},
      {"space shift", number(0), number(1), number(0), [](const Point& p, long double s) { return Point{p[0], p[1] + s, p[2]}; }},
      {"scaling", 2 * t, x, number(0),
       [](const Point& p, long double s) { return Point{p[0] * exp(2 * s), p[1] * exp(s), p[2]}; }},
      {"u scaling", number(0), number(0), u, [](const Point& p, long double s) { return Point{p[0], p[1], p[2] * exp(s)}; }},
      {"galilei", number(0), 2 * t, -(x * u),
       [](const Point& p, long double s) {
         return Point{p[0], p[1] + 2 * s * p[0], p[2] * exp(-s * p[1] - s * s * p[0])};
       }},
      {"projective", t * t, t * x, -(x * x / 4 + t / 2) * u,
       [](const Point& p, long double s) {
         long double d = 1 - s * p[0];
         return Point{p[0] / d, p[1] / d, p[2] * sqrt(d) * exp(-s * p[1] * p[1] / (4 * d))};
       }},
      {"u squared", number(0), number(0), u * u,
       [](const Point& p, long double s) { return Point{p[0], p[1], p[2] / (1 - s * p[2])}; }},
      {"x squared", number(0), x * x, number(0),
       [](const Point& p, long double s) { return Point{p[0], p[1] / (1 - s * p[1]), p[2]}; }},
      {"u transport", number(0), u, number(0),
       [](const Point& p, long double s) { return Point{p[0], p[1] + s * p[2], p[2]}; }},
      {"x in time", x, number(0), u,
       [](const Point& p, long double s) { return Point{p[0] + s * p[1], p[1], p[2] * exp(s)}; }},
      {"xu in time", x * u, number(0), number(0),
       [](const Point& p, long double s) { return Point{p[0] + s * p[1] * p[2], p[1], p[2]}; }},
  };
}

class FlowOracle {
 public:
  explicit FlowOracle(Expr phi) : phi_(std::move(phi)) {}

  long double phi(long double tt, long double xx) const {
    return numeric::evaluate<long double>(phi_, {{"t", tt}, {"x", xx}});
  }

  // psi_s(T, X): solve flow(t0, x0, phi(t0, x0)) = (T, X, .) by Newton.
  long double psi(const Flow& flow, long double s, long double T, long double X) const {
    long double t0 = T;
    long double x0 = X;
    auto residual = [&](long double a, long double b) {
      Point q = flow({a, b, phi(a, b)}, s);
      return std::array<long double, 2>{q[0] - T, q[1] - X};
    };
    for (int it = 0; it < 50; ++it) {
      auto r = residual(t0, x0);
      if (std::fabs(r[0]) + std::fabs(r[1]) < 1e-18L) break;
      const long double h = 1e-8L;
      auto rt = residual(t0 + h, x0);
      auto rx = residual(t0, x0 + h);
      long double j00 = (rt[0] - r[0]) / h, j01 = (rx[0] - r[0]) / h;
      long double j10 = (rt[1] - r[1]) / h, j11 = (rx[1] - r[1]) / h;
      long double det = j00 * j11 - j01 * j10;
      t0 -= (j11 * r[0] - j01 * r[1]) / det;
      x0 -= (-j10 * r[0] + j00 * r[1]) / det;
    }
    return flow({t0, x0, phi(t0, x0)}, s)[2];
  }

  // D^(a,b) psi_s at (T, X) by central differences
  long double psi_derivative(const Flow& flow, long double s, long double T, long double X, int a, int b) const {
    const int m = 3;
    const long double h = 2e-2L;
    auto wa = numeric::central_weights(a, m);
    auto wb = numeric::central_weights(b, m);
    long double acc = 0;
    for (int i = -m; i <= m; ++i) {
      long double ci = a ? wa[i + m] : (i == 0);
      if (ci == 0) continue;
      for (int j = -m; j <= m; ++j) {
        long double cj = b ? wb[j + m] : (j == 0);
        if (cj == 0) continue;
        acc += ci * cj * psi(flow, s, T + i * h, X + j * h);
      }
    }
    return acc / std::pow(h, a + b);
  }

  // d/ds at s = 0, fourth order
  long double rate(const Flow& flow, long double T, long double X, int a, int b) const {
    const long double hs = 2e-3L;
    auto f = [&](long double s) { return psi_derivative(flow, s, T, X, a, b); };
    return (-f(2 * hs) + 8 * f(hs) - 8 * f(-hs) + f(-2 * hs)) / (12 * hs);
  }

  // a symbolic expression in t, x and jets of u, evaluated on phi
  long double on_phi(const Expr& e, long double T, long double X) const {
    Expr v = numeric::solution_residual(e, {{"u", phi_}});
    return numeric::evaluate<long double>(v, {{"t", T}, {"x", X}});
  }

 private:
  Expr phi_;
};

// Largest relative error over the coefficients of the order-`order`
// prolongation at (T, X); `worst` names the coordinate.
inline double max_relative_error(const FlowCase& fc, const FlowOracle& oracle, long double T, long double X,
                                 int order, Expr* worst = nullptr) {
  const std::vector<std::string> tx{"t", "x"};
  Generator g{tx, {"u"}, {normalize(fc.xi_t), normalize(fc.xi_x)}, {normalize(fc.eta)}};
  double max = 0;
  for (const auto& [jt, coeff] : prolong(g, order)) {
    MultiIndex s = coordinate_of(jt, tx).counts;
    // d/ds psi_J = eta^J - xi . grad(u_J)
    long double expected = oracle.rate(fc.flow, T, X, s[0], s[1]);
    Expr grad = g.xi[0] * total_derivative(jt, "t") + g.xi[1] * total_derivative(jt, "x");
    expected += oracle.on_phi(grad, T, X);
    long double got = oracle.on_phi(coeff, T, X);
    double rel = static_cast<double>(std::fabs(got - expected) / std::max<long double>(1, std::fabs(expected)));
    if (rel > max || std::isnan(rel)) {
      max = std::isnan(rel) ? INFINITY : rel;
      if (worst) *worst = jt;
    }
  }
  return max;
}

}  // namespace approxsym::testing
