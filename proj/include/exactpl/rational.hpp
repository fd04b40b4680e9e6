#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exactpl/errors.hpp"

namespace exactpl {

// The universal scalar: an exact rational, always stored in lowest terms with
// a positive denominator.  GMP maintains the canonical form through every
// arithmetic operation; construction goes through rat() so that raw
// numerator/denominator pairs are canonicalized exactly once.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw precondition_error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw precondition_error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline const Rat& rat_min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// r^k for integer k (k may be negative; r must be nonzero then).
inline Rat rat_pow(const Rat& r, long k) {
  if (k == 0) return Rat(1);
  bool invert = k < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), r.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), r.get_den().get_mpz_t(), e);
  if (invert) {
    if (num == 0) throw precondition_error("zero to a negative power");
    std::swap(num, den);
    if (den < 0) { den = -den; num = -num; }
  }
  return { num, den };  // powers of a canonical value are canonical
}

inline mpz_class rat_floor(const Rat& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return q;
}

inline mpz_class rat_ceil(const Rat& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return q;
}

// Canonical text form: "n" for integers, "n/d" otherwise.
inline std::string rat_str(const Rat& r) { return r.get_str(); }

// Always-slashed form used by the PL/IS file formats.
inline std::string rat_slashed(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// Parses the literal grammar -?[0-9]+(/[1-9][0-9]*)?  The value is
// canonicalized after parsing, so non-reduced input is accepted.
inline Rat rat_parse(std::string_view text) {
  auto fail = [&] { throw parse_error("bad rational literal: '" + std::string(text) + "'"); };
  size_t i = 0;
  if (i < text.size() && text[i] == '-') i++;
  size_t num_begin = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) i++;
  if (i == num_begin) fail();
  size_t num_end = i;
  if (i < text.size()) {
    if (text[i] != '/') fail();
    i++;
    size_t den_begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) i++;
    if (i != text.size() || i == den_begin) fail();
    if (text[den_begin] == '0') fail();
    (void)num_end;
  }
  Rat r;
  if (r.set_str(std::string(text), 10) != 0) fail();
  r.canonicalize();
  return r;
}

// Simplest rational (smallest denominator, then smallest |numerator|) in the
// closed interval [lo, hi].  Stern-Brocot style descent.
inline Rat simplest_rational_in(const Rat& lo, const Rat& hi) {
  if (hi < lo) throw precondition_error("simplest_rational_in: empty interval");
  if (lo <= 0 && 0 <= hi) return Rat(0);
  if (hi < 0) return -simplest_rational_in(-hi, -lo);
  // 0 < lo <= hi
  Rat a = lo, b = hi;
  // continued-fraction walk; accumulates x = a0 + 1/(a1 + 1/(...))
  std::vector<mpz_class> terms;
  while (true) {
    mpz_class fa = rat_floor(a);
    if (Rat(fa) >= a) {  // a integral
      terms.push_back(fa);
      break;
    }
    mpz_class ca = fa + 1;
    if (Rat(ca) <= b) {  // an integer lies inside
      terms.push_back(ca);
      break;
    }
    terms.push_back(fa);
    Rat na = Rat(1) / (b - Rat(fa));
    Rat nb = Rat(1) / (a - Rat(fa));
    a = na;
    b = nb;
  }
  Rat x(terms.back());
  for (auto it = terms.rbegin() + 1; it != terms.rend(); ++it)
    x = Rat(*it) + Rat(1) / x;
  return x;
}

// Decimal projection with the requested number of significant digits,
// round-half-away-from-zero.  Scientific notation keeps the writer simple and
// the output unambiguous; callers mark these values as approximate.
inline std::string rat_decimal(const Rat& r, int sig_digits) {
  if (sig_digits < 1) throw precondition_error("rat_decimal: need >= 1 digit");
  if (r == 0) return "0";
  mpz_class num = abs(r.get_num());
  const mpz_class& den = r.get_den();
  // exponent e with 10^e <= |r| < 10^{e+1}; the digit-count estimate is
  // within one and gets corrected exactly
  long e = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 10)) -
           static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 10));
  Rat mag = rat_abs(r);
  auto pow10 = [](long k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k >= 0 ? k : -k));
    return k >= 0 ? Rat(p) : Rat(mpz_class(1), p);
  };
  while (mag < pow10(e)) e--;
  while (mag >= pow10(e + 1)) e++;
  auto scaled = [&](long k) {  // round(|r| * 10^k)
    mpz_class p10, n2 = num;
    if (k >= 0) {
      mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(k));
      n2 *= p10;
      mpz_class q, rem;
      mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), n2.get_mpz_t(), den.get_mpz_t());
      if (rem * 2 >= den) q += 1;
      return q;
    }
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(-k));
    mpz_class d2 = den * p10, q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), d2.get_mpz_t());
    if (rem * 2 >= d2) q += 1;
    return q;
  };
  mpz_class digits = scaled(sig_digits - 1 - e);
  std::string ds = digits.get_str();
  if (static_cast<int>(ds.size()) > sig_digits) {  // rounding carried over
    e += 1;
    digits = scaled(sig_digits - 1 - e);
    ds = digits.get_str();
  }
  std::string mant = ds.substr(0, 1);
  if (ds.size() > 1) mant += "." + ds.substr(1);
  std::string out;
  if (r < 0) out += "-";
  out += mant + "e" + std::to_string(e);
  return out;
}

}  // namespace exactpl
