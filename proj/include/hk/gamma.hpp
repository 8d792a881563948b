#pragma once

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "hk/colength.hpp"
#include "hk/fp.hpp"
#include "hk/rational.hpp"

namespace hk {

// The representation ring carrying syzygy-gap data: free module on symbols
// l_i (i >= 0) with the structure constants below. d_n denotes the partial
// alternating sum d_n = sum_{i<n} (-1)^i l_i.

inline constexpr long long kGammaIndexBound = 1000000;

class GammaVec {
 public:
  explicit GammaVec(Prime p) : p_(p) {}

  static GammaVec lambda(Prime p, long long i) {
    check_index(i);
    GammaVec v(p);
    v.add(i, Rat(1));
    return v;
  }

  // d_n = sum_{i<n} (-1)^i l_i; d_0 = 0.
  static GammaVec delta(Prime p, long long n) {
    check_index(n);
    GammaVec v(p);
    for (long long i = 0; i < n; ++i) v.add(i, i % 2 == 0 ? Rat(1) : Rat(-1));
    return v;
  }

  Prime prime() const { return p_; }
  const std::map<long long, Rat>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }

  void add(long long i, const Rat& x) {
    if (i < 0) throw std::invalid_argument("negative basis index");
    if (x == 0) return;
    auto it = c_.find(i);
    if (it == c_.end()) {
      c_.emplace(i, x);
    } else {
      it->second += x;
      if (it->second == 0) c_.erase(it);
    }
  }

  Rat coeff(long long i) const {
    auto it = c_.find(i);
    return it == c_.end() ? Rat(0) : it->second;
  }

  // Coefficient of l_0; on a depth-n bracket this evaluates e_n.
  Rat alpha() const { return coeff(0); }

  long long max_index() const { return c_.empty() ? -1 : c_.rbegin()->first; }

  bool is_integral() const {
    for (const auto& [i, x] : c_)
      if (!rat_is_int(x)) return false;
    return true;
  }

  GammaVec operator+(const GammaVec& o) const {
    check_same(o);
    GammaVec r = *this;
    for (const auto& [i, x] : o.c_) r.add(i, x);
    return r;
  }

  GammaVec operator-(const GammaVec& o) const {
    check_same(o);
    GammaVec r = *this;
    for (const auto& [i, x] : o.c_) r.add(i, -x);
    return r;
  }

  GammaVec operator-() const {
    GammaVec r(p_);
    for (const auto& [i, x] : c_) r.c_.emplace(i, -x);
    return r;
  }

  GammaVec operator*(const Rat& s) const {
    GammaVec r(p_);
    if (s == 0) return r;
    for (const auto& [i, x] : c_) r.c_.emplace(i, x * s);
    return r;
  }

  bool operator==(const GammaVec& o) const { return p_ == o.p_ && c_ == o.c_; }
  bool operator!=(const GammaVec& o) const { return !(*this == o); }

  // l_i -> l_{pi} for even i, l_{pi+p-1} for odd i; a ring endomorphism.
  GammaVec theta() const {
    GammaVec r(p_);
    const long long p = p_.value();
    for (const auto& [i, x] : c_) r.add(i % 2 == 0 ? p * i : p * i + p - 1, x);
    return r;
  }

  GammaVec theta_pow(unsigned n) const {
    GammaVec r = *this;
    for (unsigned k = 0; k < n; ++k) r = r.theta();
    return r;
  }

  // l_m -> (-1)^(m + floor(m/p)) l_{floor(m/p)}; a left inverse of theta on
  // the linear level and the transition map between depths.
  GammaVec psi() const {
    GammaVec r(p_);
    const long long p = p_.value();
    for (const auto& [i, x] : c_) {
      long long q = i / p;
      r.add(q, (i + q) % 2 == 0 ? x : -x);
    }
    return r;
  }

  std::string to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, x] : c_) {
      Rat a = x;
      if (first) {
        if (a < 0) { os << "-"; a = -a; }
      } else {
        os << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      if (a != 1) os << rat_to_short_string(a) << "*";
      os << "l" << i;
      first = false;
    }
    return os.str();
  }

 private:
  static void check_index(long long i) {
    if (i < 0 || i > kGammaIndexBound)
      throw std::invalid_argument("basis index out of range");
  }
  void check_same(const GammaVec& o) const {
    if (p_ != o.p_) throw std::invalid_argument("mixed characteristics");
  }

  Prime p_;
  std::map<long long, Rat> c_;  // basis index -> nonzero coefficient
};

namespace detail {

using BasisProduct = std::map<long long, long long>;

// l_a * l_b for single basis symbols. Base case a <= b < p:
//   l_a l_b = sum of l_k for k = b-a .. min(a+b, 2p-2-a-b),
// all such k below p. Otherwise split both indices at q = p^n, the largest
// power of p at most max(a,b): with a = i q + j,
//   l_a = theta^n(l_i) * l_{j'} where j' = j (i even) or q-1-j (i odd),
// multiply the high digits in the base ring and recombine through the index
// shift rules l_t * l_{mq} = l_{mq+t} and l_t * l_{(m+1)q-1} = l_{(m+1)q-1-t}.
inline void recombine(long long m, long long t, long long q, long long p,
                      long long mult, BasisProduct& out) {
  if (t < q) {
    long long idx = m % 2 == 0 ? m * q + t : m * q + q - 1 - t;
    out[idx] += mult;
    return;
  }
  // t in [q, 2q-2]: l_t = theta^n(l_1) * l_{2q-1-t - q + q-1}... i.e. peel one
  // leading digit: l_t = theta^n(l_1) l_{2q-1-t}, then fold l_m l_1 first.
  long long lo = m - 1;
  long long hi = std::min(m + 1, 2 * p - 2 - m - 1);
  if (m == 0) { lo = 1; hi = 1; }
  for (long long r = lo; r <= hi; ++r) recombine(r, 2 * q - 1 - t, q, p, mult, out);
}

inline const BasisProduct& lambda_mul_basis(const Prime& pr, long long a, long long b) {
  if (a > b) std::swap(a, b);
  const long long p = pr.value();
  static std::map<std::tuple<long long, long long, long long>, BasisProduct> cache;
  static std::recursive_mutex mu;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto key = std::make_tuple(p, a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  BasisProduct out;
  if (b < p) {
    for (long long k = b - a; k <= std::min(a + b, 2 * p - 2 - a - b); ++k) out[k] += 1;
  } else {
    long long q = p;
    while (q <= b / p) q *= p;
    long long i = a / q, j = a % q;
    long long k = b / q, l = b % q;
    long long jp = i % 2 == 0 ? j : q - 1 - j;
    long long lp = k % 2 == 0 ? l : q - 1 - l;
    BasisProduct high = lambda_mul_basis(pr, std::min(i, k), std::max(i, k));
    BasisProduct low = lambda_mul_basis(pr, std::min(jp, lp), std::max(jp, lp));
    // Cache holds a reference-stable map; copy out of it before recursing.
    for (const auto& [m, cm] : high)
      for (const auto& [t, ct] : low) recombine(m, t, q, p, cm * ct, out);
  }
  return cache.emplace(key, std::move(out)).first->second;
}

}  // namespace detail

inline GammaVec gamma_mul(const GammaVec& u, const GammaVec& v) {
  if (u.prime() != v.prime()) throw std::invalid_argument("mixed characteristics");
  GammaVec r(u.prime());
  for (const auto& [a, ca] : u.coeffs())
    for (const auto& [b, cb] : v.coeffs()) {
      Rat c = ca * cb;
      for (const auto& [k, mult] : detail::lambda_mul_basis(u.prime(), a, b))
        r.add(k, c * mult);
    }
  return r;
}

inline GammaVec operator*(const GammaVec& u, const GammaVec& v) { return gamma_mul(u, v); }

// <f>_n from a colength table at q = p^n: the alternating sum of table
// increments, sum_i (c_{i+1} - c_i) (-1)^i l_i for i < q. alpha of the result
// is c_1 = e_n(f), and the bracket turns sums of disjoint-variable
// polynomials into products.
inline GammaVec bracket(const ColengthTable& t, Prime p) {
  long long q = t.q;
  if (static_cast<long long>(t.c.size()) < q + 1)
    throw std::invalid_argument("bracket needs table entries through a = q");
  GammaVec v(p);
  for (long long i = 0; i < q; ++i) {
    long long inc = t.c[static_cast<size_t>(i + 1)] - t.c[static_cast<size_t>(i)];
    if (inc != 0) v.add(i, i % 2 == 0 ? Rat(inc) : Rat(-inc));
  }
  return v;
}

}  // namespace hk
