#include "approxsym/numeric.hpp"

#include <algorithm>
#include <Eigen/LU>

#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "approxsym/calculus.hpp"
#include "approxsym/render.hpp"

namespace approxsym::numeric {

namespace {

template <typename T>
T power(T base, const Rational& exponent) {
  if (exponent == Rational(1, 2)) return std::sqrt(base);
  if (exponent == Rational(-1, 2)) return T(1) / std::sqrt(base);
  if (is_integer(exponent)) return std::pow(base, static_cast<T>(exponent.get_d()));
  T e = static_cast<T>(exponent.get_d());
  if (base < 0 && mpz_odd_p(exponent.get_den_mpz_t())) {
    return (mpz_odd_p(exponent.get_num_mpz_t()) ? T(-1) : T(1)) * std::pow(-base, e);
  }
  return std::pow(base, e);
}

template <typename T>
T dawson_of(T y, DawsonVariant v) {
  return v == DawsonVariant::Standard ? dawson(y) : dawson_printed(y);
}

template <typename T>
T walk(const Expr& e, const Env<T>& env, DawsonVariant v) {
  switch (e.kind()) {
    case Kind::Number: return static_cast<T>(e.number().get_d());
    case Kind::Parameter:
    case Kind::Variable: {
      auto it = env.find(e->name);
      if (it == env.end()) throw EvalError("unbound symbol " + e->name);
      return it->second;
    }
    case Kind::Jet: throw EvalError("cannot evaluate jet coordinate " + render(e));
    case Kind::Function: {
      if (e->name != "dawson" || e->partials.at(0) != 0) {
        throw EvalError("cannot evaluate function " + render(e));
      }
      return dawson_of(walk(e->args[0], env, v), v);
    }
    case Kind::Sin: return std::sin(walk(e->args[0], env, v));
    case Kind::Cos: return std::cos(walk(e->args[0], env, v));
    case Kind::Exp: return std::exp(walk(e->args[0], env, v));
    case Kind::Power: {
      T b = walk(e->args[0], env, v);
      if (b < 0 && !mpz_odd_p(e->value.get_den_mpz_t())) {
        throw EvalError("negative value under an even root in " + render(e));
      }
      if (b == 0 && e->value < 0) throw EvalError("division by zero in " + render(e));
      return power(b, e->value);
    }
    case Kind::Product: {
      T acc = 1;
      for (const auto& f : e->args) acc *= walk(f, env, v);
      return acc;
    }
    case Kind::Sum: {
      T acc = 0;
      for (const auto& t : e->args) acc += walk(t, env, v);
      return acc;
    }
  }
  throw EvalError("unknown node");
}

}  // namespace

template <typename T>
T evaluate(const Expr& e, const Env<T>& env, DawsonVariant dawson_variant) {
  return walk(e, env, dawson_variant);
}

template double evaluate<double>(const Expr&, const Env<double>&, DawsonVariant);
template long double evaluate<long double>(const Expr&, const Env<long double>&, DawsonVariant);

// ---- compiled programs ----------------------------------------------------

Program Program::compile(const Expr& e, const std::vector<std::string>& slots,
                         DawsonVariant dawson_variant) {
  if (slots.size() > 64) throw EvalError("too many symbols to evaluate");
  Program p;
  p.slot_names_ = slots;
  p.dawson_ = dawson_variant;
  std::map<Expr, std::uint32_t, ExprLess> seen;
  std::uint32_t root = p.emit(e, slots, seen);
  if (root + 1 != p.ops_.size()) {
    // the root was shared with an earlier subtree; copy it to the end
    Instr copy{Op::Add, static_cast<std::uint32_t>(p.args_.size()), 1};
    p.args_.push_back(root);
    p.ops_.push_back(copy);
    p.uses_.push_back(p.uses_[root]);
  }
  return p;
}

std::uint32_t Program::emit(const Expr& e, const std::vector<std::string>& slots,
                            std::map<Expr, std::uint32_t, ExprLess>& seen) {
  if (auto it = seen.find(e); it != seen.end()) return it->second;
  Instr ins;
  std::vector<std::uint32_t> operands;
  std::uint64_t uses = 0;
  auto operand = [&](const Expr& a) {
    std::uint32_t r = emit(a, slots, seen);
    operands.push_back(r);
    uses |= uses_[r];
  };
  switch (e.kind()) {
    case Kind::Number:
      ins.op = Op::Const;
      ins.value = static_cast<long double>(e.number().get_d());
      break;
    case Kind::Parameter:
    case Kind::Variable: {
      auto it = std::find(slots.begin(), slots.end(), e->name);
      if (it == slots.end()) throw EvalError("unbound symbol " + e->name);
      ins.op = Op::Load;
      ins.slot = static_cast<std::int32_t>(it - slots.begin());
      uses = std::uint64_t{1} << ins.slot;
      break;
    }
    case Kind::Jet: throw EvalError("cannot evaluate jet coordinate " + render(e));
    case Kind::Function:
      if (e->name != "dawson" || e->partials.at(0) != 0) {
        throw EvalError("cannot evaluate function " + render(e));
      }
      ins.op = Op::Dawson;
      operand(e->args[0]);
      break;
    case Kind::Sin: ins.op = Op::Sin; operand(e->args[0]); break;
    case Kind::Cos: ins.op = Op::Cos; operand(e->args[0]); break;
    case Kind::Exp: ins.op = Op::Exp; operand(e->args[0]); break;
    case Kind::Power:
      operand(e->args[0]);
      if (e->value == Rational(1, 2)) {
        ins.op = Op::Sqrt;
      } else if (e->value == -1) {
        ins.op = Op::Recip;
      } else {
        ins.op = Op::Pow;
        ins.value = static_cast<long double>(e->value.get_d());
        ins.odd_root = mpz_odd_p(e->value.get_den_mpz_t()) != 0;
        ins.odd_power = mpz_odd_p(e->value.get_num_mpz_t()) != 0;
      }
      break;
    case Kind::Product:
    case Kind::Sum:
      ins.op = e.kind() == Kind::Sum ? Op::Add : Op::Mul;
      for (const auto& a : e->args) operand(a);
      break;
  }
  ins.first = static_cast<std::uint32_t>(args_.size());
  ins.count = static_cast<std::uint32_t>(operands.size());
  args_.insert(args_.end(), operands.begin(), operands.end());
  ops_.push_back(ins);
  uses_.push_back(uses);
  auto index = static_cast<std::uint32_t>(ops_.size() - 1);
  seen.emplace(e, index);
  return index;
}

template <typename T>
T Program::step(const Instr& i, const T* slots, const T* regs) const {
  const std::uint32_t* a = args_.data() + i.first;
  switch (i.op) {
    case Op::Const: return static_cast<T>(i.value);
    case Op::Load: return slots[i.slot];
    case Op::Add: {
      T acc = regs[a[0]];
      for (std::uint32_t k = 1; k < i.count; ++k) acc += regs[a[k]];
      return acc;
    }
    case Op::Mul: {
      T acc = regs[a[0]];
      for (std::uint32_t k = 1; k < i.count; ++k) acc *= regs[a[k]];
      return acc;
    }
    case Op::Sqrt: return std::sqrt(regs[a[0]]);
    case Op::Recip: return T(1) / regs[a[0]];
    case Op::Pow: {
      T b = regs[a[0]];
      T e = static_cast<T>(i.value);
      if (b < 0 && i.odd_root) return (i.odd_power ? T(-1) : T(1)) * std::pow(-b, e);
      return std::pow(b, e);
    }
    case Op::Exp: return std::exp(regs[a[0]]);
    case Op::Sin: return std::sin(regs[a[0]]);
    case Op::Cos: return std::cos(regs[a[0]]);
    case Op::Dawson: return dawson_of(regs[a[0]], dawson_);
  }
  return T(0);
}

template <typename T>
T Program::run(const T* slots) const {
  std::vector<T> regs(ops_.size());
  for (std::size_t k = 0; k < ops_.size(); ++k) regs[k] = step(ops_[k], slots, regs.data());
  return regs.back();
}

template <typename T>
void Program::run_subset(const T* slots, T* regs, const std::vector<std::uint32_t>& which) const {
  for (std::uint32_t k : which) regs[k] = step(ops_[k], slots, regs);
}

std::vector<std::uint32_t> Program::depending_on(std::size_t s) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t k = 0; k < ops_.size(); ++k) {
    if (uses_[k] >> s & 1U) out.push_back(k);
  }
  return out;
}

std::vector<std::uint32_t> Program::independent_of(std::size_t s) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t k = 0; k < ops_.size(); ++k) {
    if (!(uses_[k] >> s & 1U)) out.push_back(k);
  }
  return out;
}

template double Program::run<double>(const double*) const;
template long double Program::run<long double>(const long double*) const;
template void Program::run_subset<double>(const double*, double*, const std::vector<std::uint32_t>&) const;

// ---- grids ------------------------------------------------------------------

int thread_count() {
  unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("APPROXSYM_THREADS")) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), n);
    if (ec == std::errc() && n > 0) return std::min(n, static_cast<int>(hw));
  }
  return static_cast<int>(hw);
}

void GridSpec::validate() const {
  if (nt < 2 || nx < 2) throw EvalError("grid needs at least 2 points per axis");
  if (!std::isfinite(t0) || !std::isfinite(t1) || !std::isfinite(x0) || !std::isfinite(x1) || t1 <= t0 ||
      x1 <= x0) {
    throw EvalError("grid ranges must be finite and increasing");
  }
}

namespace {

std::string point_text(const GridSpec& g, double t, double x) {
  std::ostringstream s;
  s << std::setprecision(6) << "(" << g.t_name << "=" << t << ", " << g.x_name << "=" << x << ")";
  return s.str();
}

}  // namespace

Eigen::ArrayXXd evaluate_grid(const Expr& e, const Env<double>& params, const GridSpec& grid,
                              DawsonVariant dawson_variant) {
  grid.validate();
  std::vector<std::string> slots{grid.t_name, grid.x_name};
  std::vector<double> base{0, 0};
  for (const auto& [name, value] : params) {
    if (name == grid.t_name || name == grid.x_name) continue;
    slots.push_back(name);
    base.push_back(value);
  }
  Program prog = Program::compile(e, slots, dawson_variant);
  // everything not involving x is computed once per t row
  const std::vector<std::uint32_t> row_part = prog.independent_of(1);
  const std::vector<std::uint32_t> point_part = prog.depending_on(1);
  Eigen::ArrayXd ts = grid.t_axis();
  Eigen::ArrayXd xs = grid.x_axis();
  Eigen::ArrayXXd out(grid.nt, grid.nx);

  int workers = std::min<int>(thread_count(), static_cast<int>(grid.nt));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::vector<double> local = base;
      std::vector<double> regs(prog.size());
      for (Eigen::Index i = w; i < grid.nt; i += workers) {
        local[0] = ts(i);
        prog.run_subset(local.data(), regs.data(), row_part);
        for (Eigen::Index j = 0; j < grid.nx; ++j) {
          local[1] = xs(j);
          prog.run_subset(local.data(), regs.data(), point_part);
          out(i, j) = regs.back();
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  // first bad point in row-major order, independent of scheduling
  for (Eigen::Index i = 0; i < grid.nt; ++i) {
    for (Eigen::Index j = 0; j < grid.nx; ++j) {
      if (!std::isfinite(out(i, j))) {
        throw EvalError("value is not finite at " + point_text(grid, ts(i), xs(j)));
      }
    }
  }
  return out;
}

GridMax max_abs_on_grid(const Expr& e, const Env<double>& params, const GridSpec& grid,
                        DawsonVariant dawson_variant) {
  Eigen::ArrayXXd v = evaluate_grid(e, params, grid, dawson_variant).abs();
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double m = v.maxCoeff(&i, &j);
  return {m, grid.t_axis()(i), grid.x_axis()(j)};
}

Expr solution_residual(const Expr& equation, const std::map<std::string, Expr>& solution) {
  Bindings b;
  for (const auto& j : jets_in(equation)) {
    auto it = solution.find(j->name);
    if (it == solution.end()) throw EvalError("no value for " + j->name);
    Expr d = it->second;
    for (const auto& w : j->wrt) d = diff(d, variable(w));
    b.emplace(j, d);
  }
  return replace(equation, b);
}

std::vector<long double> central_weights(int derivative, int half_width) {
  if (derivative < 0 || half_width < 1 || derivative > 2 * half_width) {
    throw EvalError("stencil too narrow for the derivative");
  }
  const int n = 2 * half_width + 1;
  std::vector<long double> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i - half_width;
  // c[j][k]: weight of node j for the k-th derivative
  std::vector<std::vector<long double>> c(n, std::vector<long double>(derivative + 1, 0));
  long double c1 = 1;
  long double c4 = nodes[0];
  c[0][0] = 1;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, derivative);
    long double c2 = 1;
    const long double c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      const long double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<long double> out(n);
  for (int j = 0; j < n; ++j) out[j] = c[j][derivative];
  return out;
}

Eigen::ArrayXXd fd_residual_grid(const Expr& equation, const std::map<std::string, Expr>& solution,
                                 const Env<double>& params, const GridSpec& grid,
                                 const FiniteDifferenceSpec& fd, DawsonVariant dawson_variant) {
  grid.validate();
  if (!(fd.step > 0)) throw EvalError("finite-difference step must be positive");
  std::vector<std::string> slots{grid.t_name, grid.x_name};
  std::vector<long double> base{0, 0};
  for (const auto& [name, value] : params) {
    if (name == grid.t_name || name == grid.x_name) continue;
    slots.push_back(name);
    base.push_back(value);
  }
  const std::size_t n_params = slots.size();

  struct JetPlan {
    std::size_t program;  // index into closed-form programs
    int dt = 0;
    int dx = 0;
  };
  std::vector<JetPlan> plans;
  std::vector<Program> closed;
  std::map<std::string, std::size_t> closed_index;
  Bindings as_slots;
  for (const Expr& j : jets_in(equation)) {
    if (j->index >= 0) throw EvalError("expansion coefficients cannot be differenced");
    auto it = solution.find(j->name);
    if (it == solution.end()) throw EvalError("no value for " + j->name);
    auto [pos, fresh] = closed_index.emplace(j->name, closed.size());
    if (fresh) closed.push_back(Program::compile(it->second, std::vector<std::string>(slots.begin(), slots.begin() + n_params), dawson_variant));
    JetPlan plan{pos->second};
    for (const auto& w : j->wrt) {
      if (w == grid.t_name) ++plan.dt;
      else if (w == grid.x_name) ++plan.dx;
      else throw EvalError("derivative in " + w + " is not a grid direction");
    }
    std::string slot = "jet#" + std::to_string(plans.size());
    as_slots.emplace(j, parameter(slot));
    slots.push_back(slot);
    base.push_back(0);
    plans.push_back(plan);
  }
  Program eq = Program::compile(replace(equation, as_slots), slots, dawson_variant);

  const int m = fd.half_width;
  const int width = 2 * m + 1;
  std::vector<std::vector<long double>> weights;
  for (int d = 0; d <= 2 * m; ++d) weights.push_back(central_weights(d, m));
  const long double h = fd.step;

  Eigen::ArrayXd ts = grid.t_axis();
  Eigen::ArrayXd xs = grid.x_axis();
  Eigen::ArrayXXd out(grid.nt, grid.nx);
  int workers = std::min<int>(thread_count(), static_cast<int>(grid.nt));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::vector<long double> local = base;
      std::vector<long double> at(n_params);
      // closed-form values on the (2m+1)^2 stencil, filled on demand
      std::vector<long double> cache(closed.size() * width * width);
      std::vector<char> have(cache.size());
      for (Eigen::Index i = w; i < grid.nt; i += workers) {
        for (Eigen::Index jx = 0; jx < grid.nx; ++jx) {
          std::fill(have.begin(), have.end(), 0);
          const long double t = ts(i);
          const long double x = xs(jx);
          std::copy(base.begin(), base.begin() + n_params, at.begin());
          auto value = [&](std::size_t prog, int a, int b) {
            std::size_t key = (prog * width + (a + m)) * width + (b + m);
            if (!have[key]) {
              at[0] = t + a * h;
              at[1] = x + b * h;
              cache[key] = closed[prog].run(at.data());
              have[key] = 1;
            }
            return cache[key];
          };
          for (std::size_t p = 0; p < plans.size(); ++p) {
            const JetPlan& plan = plans[p];
            long double d = 0;
            for (int a = -m; a <= m; ++a) {
              long double wt = plan.dt ? weights[plan.dt][a + m] : (a == 0 ? 1 : 0);
              if (wt == 0) continue;
              for (int b = -m; b <= m; ++b) {
                long double wx = plan.dx ? weights[plan.dx][b + m] : (b == 0 ? 1 : 0);
                if (wx == 0) continue;
                d += wt * wx * value(plan.program, a, b);
              }
            }
            local[n_params + p] = d / std::pow(h, plan.dt + plan.dx);
          }
          local[0] = t;
          local[1] = x;
          out(i, jx) = static_cast<double>(eq.run(local.data()));
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (Eigen::Index i = 0; i < grid.nt; ++i) {
    for (Eigen::Index j = 0; j < grid.nx; ++j) {
      if (!std::isfinite(out(i, j))) {
        throw EvalError("value is not finite near " + point_text(grid, ts(i), xs(j)));
      }
    }
  }
  return out;
}

Eigen::ArrayXXd eps_coefficient(const std::function<Eigen::ArrayXXd(double)>& at, int k, int degree) {
  if (degree < 0 || k < 0 || k > degree) throw EvalError("bad order for the eps coefficient");
  const int n = degree + 1;
  Eigen::VectorXd nodes(n);
  for (int i = 0; i < n; ++i) nodes(i) = degree == 0 ? 0.0 : -1.0 + 2.0 * i / degree;
  Eigen::MatrixXd v(n, n);  // v(i, p) = nodes(i)^p
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < n; ++p) v(i, p) = std::pow(nodes(i), p);
  }
  // row k of the inverse maps samples to the k-th coefficient
  Eigen::MatrixXd inv = v.fullPivLu().inverse();
  Eigen::ArrayXXd out;
  for (int i = 0; i < n; ++i) {
    Eigen::ArrayXXd sample = at(nodes(i));
    out = i == 0 ? Eigen::ArrayXXd(inv(k, i) * sample) : Eigen::ArrayXXd(out + inv(k, i) * sample);
  }
  return out;
}

std::vector<ScanRow> residual_order_scan(const ScanSpec& spec) {
  if (spec.halvings < 0) throw EvalError("halvings must be non-negative");
  std::vector<ScanRow> rows;
  double eps = spec.epsilon;
  for (int k = 0; k <= spec.halvings; ++k, eps /= 2) {
    Env<double> params = spec.params;
    params[spec.eps_name] = eps;
    ScanRow row{eps, max_abs_on_grid(spec.residual, params, spec.grid, spec.dawson_variant).value, {}};
    if (!rows.empty() && row.max_residual > 0 && rows.back().max_residual > 0) {
      row.observed_order = std::log2(rows.back().max_residual / row.max_residual);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "epsilon,max_residual,observed_order\n";
  for (const auto& r : rows) {
    std::ostringstream line;
    line << std::setprecision(6) << r.epsilon << ',' << std::scientific << std::setprecision(6)
         << r.max_residual << ',';
    if (r.observed_order) line << std::fixed << std::setprecision(4) << *r.observed_order;
    out << line.str() << '\n';
  }
}

void write_surface(std::ostream& out, const Expr& u, const Env<double>& params, const GridSpec& grid,
                   DawsonVariant dawson_variant) {
  Eigen::ArrayXXd v = evaluate_grid(u, params, grid, dawson_variant);
  Eigen::ArrayXd ts = grid.t_axis();
  Eigen::ArrayXd xs = grid.x_axis();
  out << "# " << grid.t_name << ' ' << grid.x_name << " u\n";
  for (Eigen::Index i = 0; i < grid.nt; ++i) {
    for (Eigen::Index j = 0; j < grid.nx; ++j) {
      out << std::setprecision(10) << ts(i) << ' ' << xs(j) << ' ' << v(i, j) << '\n';
    }
    out << '\n';
  }
}

}  // namespace approxsym::numeric
