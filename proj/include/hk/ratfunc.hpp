#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hk/rational.hpp"

namespace hk {

// Dense integer polynomials in z, ascending coefficients, no trailing zeros.
using ZPoly = std::vector<Int>;

inline void zp_trim(ZPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline long long zp_deg(const ZPoly& a) { return static_cast<long long>(a.size()) - 1; }

inline bool zp_is_zero(const ZPoly& a) { return a.empty(); }

inline ZPoly zp_const(const Int& c) {
  ZPoly a;
  if (c != 0) a.push_back(c);
  return a;
}

inline ZPoly zp_add(const ZPoly& a, const ZPoly& b) {
  ZPoly r(std::max(a.size(), b.size()), Int(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  zp_trim(r);
  return r;
}

inline ZPoly zp_sub(const ZPoly& a, const ZPoly& b) {
  ZPoly r(std::max(a.size(), b.size()), Int(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  zp_trim(r);
  return r;
}

inline ZPoly zp_neg(const ZPoly& a) {
  ZPoly r = a;
  for (auto& c : r) c = -c;
  return r;
}

inline ZPoly zp_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, Int(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  zp_trim(r);
  return r;
}

inline ZPoly zp_scale(const ZPoly& a, const Int& c) {
  if (c == 0) return {};
  ZPoly r = a;
  for (auto& x : r) x *= c;
  return r;
}

// Exact division; throws if the division leaves a remainder.
inline ZPoly zp_divexact(const ZPoly& a, const ZPoly& b) {
  if (zp_is_zero(b)) throw std::invalid_argument("division by zero polynomial");
  if (zp_is_zero(a)) return {};
  if (a.size() < b.size()) throw std::invalid_argument("inexact polynomial division");
  ZPoly rem = a;
  ZPoly quo(a.size() - b.size() + 1, Int(0));
  for (long long i = static_cast<long long>(quo.size()) - 1; i >= 0; --i) {
    Int lead = rem[static_cast<size_t>(i) + b.size() - 1];
    if (lead == 0) continue;
    if (lead % b.back() != 0) throw std::invalid_argument("inexact polynomial division");
    Int q = lead / b.back();
    quo[static_cast<size_t>(i)] = q;
    for (size_t j = 0; j < b.size(); ++j) rem[static_cast<size_t>(i) + j] -= q * b[j];
  }
  zp_trim(rem);
  if (!rem.empty()) throw std::invalid_argument("inexact polynomial division");
  zp_trim(quo);
  return quo;
}

inline Int zp_content(const ZPoly& a) {
  Int g = 0;
  for (const auto& c : a) g = boost::multiprecision::gcd(g, c);
  return g;
}

inline ZPoly zp_primitive(const ZPoly& a) {
  Int c = zp_content(a);
  if (c == 0 || c == 1) return a;
  ZPoly r = a;
  for (auto& x : r) x /= c;
  return r;
}

// gcd of the primitive parts via a primitive pseudo-remainder sequence.
inline ZPoly zp_gcd(ZPoly a, ZPoly b) {
  a = zp_primitive(a);
  b = zp_primitive(b);
  if (zp_is_zero(a)) return b;
  if (zp_is_zero(b)) return a;
  if (zp_deg(a) < zp_deg(b)) std::swap(a, b);
  while (!zp_is_zero(b)) {
    // Pseudo-remainder of a by b.
    ZPoly rem = a;
    long long db = zp_deg(b);
    while (zp_deg(rem) >= db) {
      long long k = zp_deg(rem) - db;
      Int lead = rem.back();
      rem = zp_sub(zp_scale(rem, b.back()), [&] {
        ZPoly shifted(static_cast<size_t>(k), Int(0));
        for (const auto& c : b) shifted.push_back(c * lead);
        return shifted;
      }());
    }
    a = b;
    b = zp_primitive(rem);
  }
  if (!a.empty() && a.back() < 0) a = zp_neg(a);
  return a;
}

inline Rat zp_eval(const ZPoly& a, const Rat& z) {
  Rat r(0);
  for (size_t i = a.size(); i-- > 0;) r = r * z + Rat(a[i]);
  return r;
}

inline std::string zp_to_string(const ZPoly& a) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    Int c = a[i];
    if (first) {
      if (c < 0) { os << "-"; c = -c; }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    if (i == 0) {
      os << c.str();
    } else {
      if (c != 1) os << c.str() << "*";
      os << "z";
      if (i > 1) os << "^" << i;
    }
    first = false;
  }
  return os.str();
}

// num/den with integer coefficients, coprime, den(0) = 1.
struct RatFunc {
  ZPoly num;
  ZPoly den{Int(1)};

  static RatFunc from_parts(ZPoly n, ZPoly d) {
    RatFunc r;
    r.num = std::move(n);
    r.den = std::move(d);
    r.reduce();
    return r;
  }

  void reduce() {
    zp_trim(num);
    zp_trim(den);
    if (zp_is_zero(den)) throw std::invalid_argument("zero denominator");
    if (zp_is_zero(num)) {
      den = {Int(1)};
      return;
    }
    ZPoly g = zp_gcd(num, den);
    if (zp_deg(g) > 0 || (!g.empty() && g[0] != 1)) {
      num = zp_divexact(num, g);
      den = zp_divexact(den, g);
    }
    Int cn = zp_content(num), cd = zp_content(den);
    Int c = boost::multiprecision::gcd(cn, cd);
    if (c > 1) {
      for (auto& x : num) x /= c;
      for (auto& x : den) x /= c;
    }
    if (den[0] < 0) {
      num = zp_neg(num);
      den = zp_neg(den);
    }
  }

  void validate() const {
    if (zp_is_zero(den) || den[0] != 1)
      throw std::logic_error("denominator must have constant term 1");
  }

  bool operator==(const RatFunc& o) const {
    // Both sides reduced: cross-multiply to dodge sign/content conventions.
    return zp_mul(num, o.den) == zp_mul(o.num, den);
  }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }

  // Taylor coefficients c_0..c_n of num/den around z = 0.
  std::vector<Rat> taylor(size_t n) const {
    if (zp_is_zero(den) || den[0] == 0)
      throw std::invalid_argument("no Taylor expansion at a pole");
    std::vector<Rat> c(n + 1, Rat(0));
    for (size_t k = 0; k <= n; ++k) {
      Rat acc = k < num.size() ? Rat(num[k]) : Rat(0);
      for (size_t j = 1; j <= k && j < den.size(); ++j) acc -= Rat(den[j]) * c[k - j];
      c[k] = acc / Rat(den[0]);
    }
    return c;
  }

  Rat eval(const Rat& z) const {
    Rat d = zp_eval(den, z);
    if (d == 0) throw std::invalid_argument("evaluation at a pole");
    return zp_eval(num, z) / d;
  }

  std::string to_string() const {
    std::string n = zp_to_string(num), d = zp_to_string(den);
    if (d == "1") return n;
    return "(" + n + ")/(" + d + ")";
  }
};

// Multiplies the denominator by (1 - c z) and renormalizes.
inline RatFunc rf_div_geom(const RatFunc& f, const Int& c) {
  ZPoly factor{Int(1), -c};
  return RatFunc::from_parts(f.num, zp_mul(f.den, factor));
}

struct RecurrenceResult {
  RatFunc fn;
  // Number of supplied values beyond the minimum needed to pin down fn.
  long long predicted_count = 0;
  bool confirmed = false;
};

// Finds the rational function of smallest denominator degree whose Taylor
// expansion matches every supplied value. Throws if none fits.
inline RecurrenceResult detect_recurrence(const std::vector<Rat>& values) {
  const long long len = static_cast<long long>(values.size());
  if (len < 4) throw std::invalid_argument("need at least 4 values to detect a recurrence");

  auto finish = [&](const std::vector<Rat>& num_q, const std::vector<Rat>& den_q) {
    Int lc = 1;
    for (const auto& c : num_q) lc = boost::multiprecision::lcm(lc, rat_den(c));
    for (const auto& c : den_q) lc = boost::multiprecision::lcm(lc, rat_den(c));
    ZPoly n, d;
    for (const auto& c : num_q) n.push_back(rat_num(c * Rat(lc)));
    for (const auto& c : den_q) d.push_back(rat_num(c * Rat(lc)));
    RecurrenceResult res;
    res.fn = RatFunc::from_parts(std::move(n), std::move(d));
    res.predicted_count = len - (zp_deg(res.fn.num) + zp_deg(res.fn.den) + 1);
    res.confirmed = res.predicted_count >= 2;
    return res;
  };

  bool all_zero = true;
  for (const auto& v : values)
    if (v != 0) { all_zero = false; break; }
  if (all_zero) {
    RecurrenceResult res;
    res.predicted_count = len;
    res.confirmed = true;
    return res;
  }

  for (long long D = 1; D <= (len - 1) / 2; ++D) {
    const long long N = len - 2 - D;
    // Rows m = N+1..len-1 of (1 + d_1 z + ... + d_D z^D) * v must vanish.
    const long long rows = len - 1 - N;
    std::vector<std::vector<Rat>> A(static_cast<size_t>(rows),
                                    std::vector<Rat>(static_cast<size_t>(D) + 1, Rat(0)));
    for (long long r = 0; r < rows; ++r) {
      long long m = N + 1 + r;
      for (long long j = 1; j <= D; ++j)
        A[static_cast<size_t>(r)][static_cast<size_t>(j - 1)] = values[static_cast<size_t>(m - j)];
      A[static_cast<size_t>(r)][static_cast<size_t>(D)] = -values[static_cast<size_t>(m)];
    }
    // Gaussian elimination with consistency check; free unknowns go to zero.
    std::vector<long long> pivot_col(static_cast<size_t>(rows), -1);
    long long rank = 0;
    for (long long col = 0; col < D && rank < rows; ++col) {
      long long sel = -1;
      for (long long r = rank; r < rows; ++r)
        if (A[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) { sel = r; break; }
      if (sel < 0) continue;
      std::swap(A[static_cast<size_t>(sel)], A[static_cast<size_t>(rank)]);
      const Rat inv = Rat(1) / A[static_cast<size_t>(rank)][static_cast<size_t>(col)];
      for (auto& x : A[static_cast<size_t>(rank)]) x *= inv;
      for (long long r = 0; r < rows; ++r) {
        if (r == rank) continue;
        const Rat f = A[static_cast<size_t>(r)][static_cast<size_t>(col)];
        if (f == 0) continue;
        for (long long c = col; c <= D; ++c)
          A[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
              f * A[static_cast<size_t>(rank)][static_cast<size_t>(c)];
      }
      pivot_col[static_cast<size_t>(rank)] = col;
      ++rank;
    }
    bool consistent = true;
    for (long long r = rank; r < rows; ++r)
      if (A[static_cast<size_t>(r)][static_cast<size_t>(D)] != 0) { consistent = false; break; }
    if (!consistent) continue;

    std::vector<Rat> d(static_cast<size_t>(D) + 1, Rat(0));
    d[0] = Rat(1);
    for (long long r = 0; r < rank; ++r)
      d[static_cast<size_t>(pivot_col[static_cast<size_t>(r)]) + 1] =
          A[static_cast<size_t>(r)][static_cast<size_t>(D)];
    std::vector<Rat> num_q;
    for (long long k = 0; k <= N; ++k) {
      Rat acc(0);
      for (long long j = 0; j <= std::min(k, D); ++j)
        acc += d[static_cast<size_t>(j)] * values[static_cast<size_t>(k - j)];
      num_q.push_back(acc);
    }
    while (!num_q.empty() && num_q.back() == 0) num_q.pop_back();
    return finish(num_q, d);
  }
  throw std::runtime_error("no rational recurrence fits the provided values");
}

inline RecurrenceResult detect_recurrence(const std::vector<Int>& values) {
  std::vector<Rat> v;
  v.reserve(values.size());
  for (const auto& x : values) v.emplace_back(x);
  return detect_recurrence(v);
}

}  // namespace hk
