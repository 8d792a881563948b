#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hk {

// Expression templates stay off so every operator returns a value; a lambda
// or function with a deduced return type can then never hand back a proxy
// that refers to locals which have already been destroyed.
using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                          boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                          boost::multiprecision::et_off>;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline Int int_pow(Int base, unsigned exp) {
  Int r = 1;
  while (exp) {
    if (exp & 1u) r *= base;
    base *= base;
    exp >>= 1u;
  }
  return r;
}

// Canonical form "a/b" with b > 0 and gcd(a,b) = 1; Rat keeps that
// normalization internally, so formatting is direct.
inline std::string rat_to_string(const Rat& r) {
  return rat_num(r).str() + "/" + rat_den(r).str();
}

// Accepts "a/b" and bare integers "a".
inline Rat rat_from_string(const std::string& s) {
  auto bad = [&]() -> Rat {
    throw std::invalid_argument("bad rational literal: '" + s + "'");
  };
  if (s.empty()) return bad();
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) return bad();
    return Rat(num, den);
  } catch (const std::runtime_error&) {
    return bad();
  }
}

inline bool rat_is_int(const Rat& r) { return rat_den(r) == 1; }

inline std::string rat_to_short_string(const Rat& r) {
  if (rat_is_int(r)) return rat_num(r).str();
  return rat_to_string(r);
}

}  // namespace hk
