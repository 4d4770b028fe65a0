#pragma once

// Floating-point evaluation, the Dawson function and residual-order scans on
// (t, x) grids.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "approxsym/expr.hpp"

namespace approxsym::numeric {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Standard is exp(-y^2) * int_0^y exp(z^2) dz. Printed is the integrand as
/// displayed in the solution, exp(-y^2) * int_0^y exp(-z^2) dz.
enum class DawsonVariant { Standard, Printed };

/// Positive-term series below |y| = 6, asymptotic expansion above.
template <typename T>
T dawson(T y) {
  if (y < 0) return -dawson(-y);
  if (y == 0) return T(0);
  if (y < T(6)) {
    // int_0^y exp(z^2) dz = sum y^(2n+1) / (n! (2n+1)); no cancellation
    T y2 = y * y;
    T power = y;  // y^(2n+1)/n!
    T sum = y;
    for (int n = 1; n < 400; ++n) {
      power *= y2 / T(n);
      T term = power / T(2 * n + 1);
      sum += term;
      if (term < sum * std::numeric_limits<T>::epsilon()) break;
    }
    return std::exp(-y2) * sum;
  }
  // D(y) ~ 1/(2y) * sum (2n-1)!! / (2y^2)^n
  T inv = T(1) / (T(2) * y * y);
  T term = 1;
  T sum = 1;
  for (int n = 1; n < 60; ++n) {
    T next = term * T(2 * n - 1) * inv;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < sum * std::numeric_limits<T>::epsilon()) break;
  }
  return sum / (T(2) * y);
}

template <typename T>
T dawson_printed(T y) {
  using std::erf;
  return std::exp(-y * y) * std::sqrt(std::acos(T(-1))) / T(2) * erf(y);
}

template <typename T>
using Env = std::map<std::string, T>;

/// Recursive tree walk. Parameters and variables are looked up by name.
template <typename T>
T evaluate(const Expr& e, const Env<T>& env, DawsonVariant dawson_variant = DawsonVariant::Standard);

/// Expression compiled to straight-line code over registers; repeated
/// subtrees are computed once.
class Program {
 public:
  static Program compile(const Expr& e, const std::vector<std::string>& slots,
                         DawsonVariant dawson_variant = DawsonVariant::Standard);

  template <typename T>
  T run(const T* slots) const;

  /// Runs only the instructions listed (in order) into `regs`, which must
  /// hold size() entries; the result is regs[size() - 1].
  template <typename T>
  void run_subset(const T* slots, T* regs, const std::vector<std::uint32_t>& which) const;

  /// Instructions depending on slot `s`, and the rest.
  std::vector<std::uint32_t> depending_on(std::size_t s) const;
  std::vector<std::uint32_t> independent_of(std::size_t s) const;

  std::size_t size() const { return ops_.size(); }
  const std::vector<std::string>& slots() const { return slot_names_; }

 private:
  enum class Op : std::uint8_t { Const, Load, Add, Mul, Pow, Sqrt, Recip, Exp, Sin, Cos, Dawson };
  struct Instr {
    Op op = Op::Const;
    std::uint32_t first = 0;  // operand range in args_
    std::uint32_t count = 0;
    std::int32_t slot = -1;   // Load
    long double value = 0;    // Const value or Pow exponent
    bool odd_root = false;    // Pow: the exponent's denominator is odd
    bool odd_power = false;   // Pow: the exponent's numerator is odd
  };
  std::uint32_t emit(const Expr& e, const std::vector<std::string>& slots,
                     std::map<Expr, std::uint32_t, ExprLess>& seen);
  template <typename T>
  T step(const Instr& i, const T* slots, const T* regs) const;

  std::vector<Instr> ops_;
  std::vector<std::uint32_t> args_;
  std::vector<std::uint64_t> uses_;  // slot bitmask per instruction
  std::vector<std::string> slot_names_;
  DawsonVariant dawson_ = DawsonVariant::Standard;
};

/// Threads used for grid work: APPROXSYM_THREADS if set, else the hardware count.
int thread_count();

struct GridSpec {
  std::string t_name = "t";
  std::string x_name = "x";
  double t0 = 0;
  double t1 = 2;
  double x0 = 0;
  double x1 = 4;
  Eigen::Index nt = 201;
  Eigen::Index nx = 201;

  Eigen::ArrayXd t_axis() const { return Eigen::ArrayXd::LinSpaced(nt, t0, t1); }
  Eigen::ArrayXd x_axis() const { return Eigen::ArrayXd::LinSpaced(nx, x0, x1); }
  void validate() const;
};

/// Values of `e` on the grid, rows over t and columns over x. Every other
/// symbol must be bound in `params`. Throws EvalError naming the first point
/// where the value is not finite.
Eigen::ArrayXXd evaluate_grid(const Expr& e, const Env<double>& params, const GridSpec& grid,
                              DawsonVariant dawson_variant = DawsonVariant::Standard);

struct GridMax {
  double value = 0;
  double t = 0;
  double x = 0;
};

GridMax max_abs_on_grid(const Expr& e, const Env<double>& params, const GridSpec& grid,
                        DawsonVariant dawson_variant = DawsonVariant::Standard);

/// The equations with every jet replaced by the matching derivative of the
/// closed form; left unexpanded for evaluation.
Expr solution_residual(const Expr& equation, const std::map<std::string, Expr>& solution);

/// Central-difference weights on offsets -m..m (unit spacing) for the given
/// derivative, by Fornberg's recursion.
std::vector<long double> central_weights(int derivative, int half_width);

struct FiniteDifferenceSpec {
  double step = 1e-2;
  int half_width = 4;  // accuracy order 2 * half_width
};

/// The equations' residual with every jet replaced by a finite difference of
/// the closed form, evaluated in long double. No symbolic derivative is
/// involved, so this also tests how special functions are evaluated. The
/// stencil reaches half_width * step beyond the grid.
Eigen::ArrayXXd fd_residual_grid(const Expr& equation, const std::map<std::string, Expr>& solution,
                                 const Env<double>& params, const GridSpec& grid,
                                 const FiniteDifferenceSpec& fd = {},
                                 DawsonVariant dawson_variant = DawsonVariant::Standard);

/// Coefficient of eps^k of a grid quantity that is a polynomial in eps of
/// degree at most `degree`, by interpolation at degree + 1 points in [-1, 1].
Eigen::ArrayXXd eps_coefficient(const std::function<Eigen::ArrayXXd(double)>& at, int k, int degree);

struct ScanRow {
  double epsilon = 0;
  double max_residual = 0;
  std::optional<double> observed_order;  // log2 of the previous row's ratio
};

struct ScanSpec {
  Expr residual;  // from solution_residual
  std::string eps_name = "eps";
  Env<double> params;  // everything except eps and the grid variables
  GridSpec grid;
  double epsilon = 0.03;
  int halvings = 3;
  DawsonVariant dawson_variant = DawsonVariant::Standard;
};

/// max |residual| at epsilon, epsilon/2, ... (halvings + 1 rows).
std::vector<ScanRow> residual_order_scan(const ScanSpec& spec);

/// `epsilon,max_residual,observed_order` with a header line.
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

/// gnuplot-style `t x u` lines, a blank line after each t row.
void write_surface(std::ostream& out, const Expr& u, const Env<double>& params, const GridSpec& grid,
                   DawsonVariant dawson_variant = DawsonVariant::Standard);

}  // namespace approxsym::numeric
