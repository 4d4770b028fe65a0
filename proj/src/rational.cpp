#include "approxsym/rational.hpp"

#include <cctype>

namespace approxsym {

Rational floor(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return Rational(q);
}

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  std::string digits;
  std::string fraction;
  std::string denominator;
  int stage = 0;  // 0 integer part, 1 decimals, 2 denominator
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      (stage == 0 ? digits : stage == 1 ? fraction : denominator).push_back(c);
    } else if (c == '.' && stage == 0) {
      stage = 1;
    } else if (c == '/' && stage == 0) {
      stage = 2;
    } else {
      return std::nullopt;
    }
  }
  if (digits.empty() && fraction.empty()) return std::nullopt;
  if (stage == 2 && denominator.empty()) return std::nullopt;
  if (digits.empty()) digits = "0";
  mpz_class num(digits + fraction);
  mpz_class den = 1;
  if (!fraction.empty()) {
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fraction.size());
  }
  if (stage == 2) {
    den = mpz_class(denominator);
    if (den == 0) return std::nullopt;
  }
  Rational r(num, den);
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

std::optional<mpz_class> exact_root(const mpz_class& n, unsigned long k) {
  if (n < 0) return std::nullopt;
  mpz_class root;
  if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) return root;
  return std::nullopt;
}

}  // namespace approxsym
