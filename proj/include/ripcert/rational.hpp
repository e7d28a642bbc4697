#pragma once

// Exact rational scalar type and conversions. All construction-side arithmetic
// in this library is exact; floating point only enters in the spectral kernels.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>

#include "ripcert/errors.hpp"

namespace ripcert {

using Rat = mpq_class;

inline Rat rat_of(long num, long den = 1) {
  if (den == 0) throw input_error("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Accepts "p/q", plain integers, and plain decimals ("0.25" -> 1/4).
inline Rat parse_rat(const std::string& text) {
  if (text.empty()) throw input_error("empty rational literal");
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  if (slash != std::string::npos && dot != std::string::npos)
    throw input_error("rational literal mixes '/' and '.': " + text);
  auto check_int = [&](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  if (dot != std::string::npos) {
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (!check_int(whole.empty() ? "0" : whole) || frac.empty())
      throw input_error("bad decimal literal: " + text);
    for (char ch : frac)
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw input_error("bad decimal literal: " + text);
    const bool neg = !whole.empty() && whole[0] == '-';
    mpz_class w(whole.empty() || whole == "-" || whole == "+" ? "0" : whole.c_str());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class f(frac.c_str());
    mpz_class num = abs(w) * scale + f;
    if (neg) num = -num;
    Rat r(num, scale);
    r.canonicalize();
    return r;
  }
  const std::string num = slash == std::string::npos ? text : text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!check_int(num) || !check_int(den))
    throw input_error("bad rational literal: " + text);
  Rat r;
  if (r.set_str(num + "/" + den, 10) != 0)
    throw input_error("bad rational literal: " + text);
  if (r.get_den() == 0) throw input_error("rational with zero denominator: " + text);
  r.canonicalize();
  return r;
}

// Canonical form "p/q", "q" omitted when 1.
inline std::string rat_str(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// mpq_get_d truncates toward zero; two correction passes give a result within
// a sliver of one ulp of the true value, i.e. round-to-nearest for practical purposes.
inline double rat_to_double(const Rat& r) {
  double d1 = r.get_d();
  Rat rem = r - Rat(d1);
  double d2 = rem.get_d();
  Rat rem2 = rem - Rat(d2);
  return d1 + (d2 + rem2.get_d());
}

inline long double rat_to_ldouble(const Rat& r) {
  long double acc = 0.0L;
  Rat rem = r;
  for (int pass = 0; pass < 3; ++pass) {
    double step = rem.get_d();
    acc += step;
    rem -= Rat(step);
    if (step == 0.0) break;
  }
  return acc;
}

// Exact: every finite double is a rational.
inline Rat rat_from_double(double d) {
  if (!std::isfinite(d)) throw input_error("non-finite value has no rational form");
  Rat r(d);
  r.canonicalize();
  return r;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }


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

inline long rat_floor_long(const Rat& r) {
  mpz_class f = rat_floor(r);
  if (!f.fits_slong_p()) throw capacity_error("floor does not fit a machine integer");
  return f.get_si();
}

}  // namespace ripcert
