#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace approxsym {

/// Exact arbitrary-precision rational used for every constant in the kernel.
using Rational = mpq_class;

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

/// Floor of a rational as an exact integer rational.
Rational floor(const Rational& r);

/// Parses `123`, `-7/3` or a decimal like `0.03` exactly; nullopt on bad input.
std::optional<Rational> parse_rational(std::string_view text);

std::string to_string(const Rational& r);

/// Exact k-th root of a non-negative integer, if it exists.
std::optional<mpz_class> exact_root(const mpz_class& n, unsigned long k);

}  // namespace approxsym
