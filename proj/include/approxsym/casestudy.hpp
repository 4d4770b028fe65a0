#pragma once

// The reaction-diffusion-convection case study built directly from
// expression builders (no parser involved), plus the figure parameter sets.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "approxsym/calculus.hpp"
#include "approxsym/model.hpp"
#include "approxsym/rational.hpp"

namespace approxsym::casestudy {

/// Sign of 8*beta*gamma - alpha^2.
enum class Branch { Positive, Zero, Negative };

const char* branch_name(Branch b);

struct RDCParameters {
  Rational alpha;
  Rational beta;
  Rational gamma;

  /// 8*beta*gamma - alpha^2
  Rational discriminant() const;
  Branch branch() const;
  bool valid() const { return alpha > 0 && beta > 0 && gamma > 0; }
  /// alpha, beta, gamma bound to their values.
  Bindings bindings() const;
};

/// A figure's parameter set: the solution it plots and the constants used.
struct Preset {
  std::string name;      // fig1, fig2, fig3
  std::string solution;  // sol1, sol2, sol3
  RDCParameters params;
  Rational epsilon;
  std::array<double, 4> c;  // c1..c4 (fig2 uses c2 = 2*pi)

  /// alpha, beta, gamma, c1..c4 and delta = sqrt(|8 beta gamma - alpha^2|).
  std::map<std::string, double> numeric_parameters() const;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

/// Name of the discriminant constraint for a branch ("positive", ...).
std::string branch_constraint(Branch b);

/// Equation, constraints, Xi1/Xi2 (with and without constraints), closed
/// forms of f and g, and the three exact solutions.
ModelSpec rdc_model();

/// The hyperbolic equation with every approximate generator, the f-branch
/// closed forms and all approximate solutions and ansatzes.
ModelSpec rdc_hyperbolic_model();

}  // namespace approxsym::casestudy
