#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hk/colength.hpp"
#include "hk/rational.hpp"

namespace hk {

// Hypersurface z^D - h(x, y) over F_p.  Write D = p^c * E with E coprime to
// p.  The z-adic filtration of the quotient splits into strands indexed by
// z-exponents modulo D, each strand a cyclic module killed by a power of h,
// which reduces e_n to two-variable colengths:
//   e_n = p^c * ((E - r) * colength(q, h^s) + r * colength(q, h^(s+1)))
// for n >= c, where q = p^n and p^(n-c) = s*E + r with 0 <= r < E.  For
// n < c every strand sees a single h and e_n = q * colength(q, h).
struct ZDInput {
  Poly h;
  long long D = 0;

  void validate() const {
    if (D < 1) throw std::invalid_argument("z-degree must be positive");
    if (h.is_zero()) throw std::invalid_argument("surface term h must be nonzero");
    if (h.is_unit())
      throw std::invalid_argument("surface term h must have zero constant term");
    if (h.nvars() > 2)
      throw std::invalid_argument("surface term h must use at most two variables");
  }

  // Multiplicity of p in D.
  long long c() const {
    long long d = D, k = 0, p = h.prime().value();
    while (d % p == 0) { d /= p; ++k; }
    return k;
  }

  // Part of D coprime to p.
  long long E() const {
    long long d = D, p = h.prime().value();
    while (d % p == 0) d /= p;
    return d;
  }
};

// Plug-in for colength(q, h^a) lookups, e.g. a cache-backed one.
using ZDColengthHook = std::function<long long(const Poly& h, long long q, long long a)>;

inline Int en_zd(const ZDInput& in, unsigned n,
                 long long dense_limit = kDefaultDenseLimit,
                 const ZDColengthHook& lookup = {}) {
  in.validate();
  const long long p = in.h.prime().value();
  const long long c = in.c(), E = in.E();
  Int qi = int_pow(Int(p), n);
  if (qi > Int(1000000000))
    throw std::invalid_argument("en_zd: depth too large");
  const long long q = static_cast<long long>(qi);
  auto len = [&](long long a) {
    if (lookup) return lookup(in.h, q, a);
    return colength(in.h.pow(static_cast<unsigned long>(a)), q, dense_limit);
  };
  if (n < c) return Int(q) * len(1);
  const long long pnc = static_cast<long long>(int_pow(Int(p), n - static_cast<unsigned>(c)));
  const long long s = pnc / E, r = pnc % E;
  Int res = Int(E - r) * len(s);
  if (r > 0) res += Int(r) * len(s + 1);
  return int_pow(Int(p), static_cast<unsigned>(c)) * res;
}

// Growth law e_n = mu*q^2 - mu1*r_n*(E - r_n)*q + gamma[n mod L] with
// q = p^n and L the multiplicative order of p modulo E; the lower-order
// terms are periodic because they depend on n only through r_n.  The deepest
// 2L+1 samples pin down the model: one congruence class contributes its
// three deepest values, every other class its two deepest, and the linear
// coefficients of all classes must then be multiples of r*(E-r) by one
// common mu1, which is the cross-class test the fit can fail.  period_start
// reports how far up the fitted law actually reproduces the data, and
// confirmed counts matched samples below the determining window, so
// confirmed == 0 means the fit is an interpolation that deeper samples have
// yet to test.
struct ZDFit {
  long long p = 0, D = 0, c = 0, E = 0, L = 0;
  unsigned n_max = 0;
  std::vector<Int> e;             // e_0 .. e_{n_max}
  Rat mu, mu1;
  std::vector<Rat> beta, gamma;   // class coefficients, indexed by n mod L
  unsigned period_start = 0;      // law exact for all n in [period_start, n_max]
  long long confirmed = 0;        // matched samples below the fitting window
  bool shape_rejected = false;    // mu not positive, or classes disagree on mu1
};

inline ZDFit fit_zd(Prime p, long long D, const std::vector<Int>& e) {
  if (D < 1) throw std::invalid_argument("z-degree must be positive");
  for (const Int& v : e)
    if (v < 0) throw std::invalid_argument("colength values must be nonnegative");
  ZDFit fit;
  fit.p = p.value();
  fit.D = D;
  long long d = D;
  while (d % fit.p == 0) { d /= fit.p; ++fit.c; }
  fit.E = d;
  fit.L = 1;
  if (fit.E > 1) {
    long long pk = fit.p % fit.E;
    while (pk != 1) { pk = pk * fit.p % fit.E; ++fit.L; }
  }
  if (e.empty()) throw std::invalid_argument("no values to fit");
  fit.n_max = static_cast<unsigned>(e.size() - 1);
  const long long need = fit.c + 2 * fit.L;
  if (fit.n_max < static_cast<unsigned long long>(need))
    throw std::invalid_argument("need values through depth " + std::to_string(need) +
                                " to fit the growth law");
  fit.e = e;

  auto Q = [&](long long n) { return Rat(int_pow(Int(fit.p), static_cast<unsigned>(n))); };
  auto at = [&](long long n) { return Rat(e[static_cast<size_t>(n)]); };

  // Newton interpolation through the three deepest samples of one class.
  const long long L = fit.L, b = fit.n_max - 2 * L;
  Rat q1 = Q(b), q2 = Q(b + L), q3 = Q(b + 2 * L);
  Rat d21 = (at(b + L) - at(b)) / (q2 - q1);
  Rat d32 = (at(b + 2 * L) - at(b + L)) / (q3 - q2);
  fit.mu = (d32 - d21) / (q3 - q1);
  fit.beta.assign(static_cast<size_t>(L), Rat(0));
  fit.gamma.assign(static_cast<size_t>(L), Rat(0));
  const size_t jd = static_cast<size_t>(b % L);
  fit.beta[jd] = d21 - fit.mu * (q1 + q2);
  fit.gamma[jd] = at(b) - fit.mu * q1 * q1 - fit.beta[jd] * q1;
  // Every other class from its two deepest samples, mu already known.
  for (long long j = 1; j < L; ++j) {
    const long long t = fit.n_max - j;
    Rat qa = Q(t - L), qb = Q(t);
    Rat ra = at(t - L) - fit.mu * qa * qa;
    Rat rb = at(t) - fit.mu * qb * qb;
    const size_t cls = static_cast<size_t>(t % L);
    fit.beta[cls] = (rb - ra) / (qb - qa);
    fit.gamma[cls] = ra - fit.beta[cls] * qa;
  }

  auto model = [&](long long n) {
    Rat q = Q(n);
    const size_t cls = static_cast<size_t>(n % L);
    return fit.mu * q * q + fit.beta[cls] * q + fit.gamma[cls];
  };
  long long start = fit.n_max + 1;
  for (long long n = fit.n_max; n >= fit.c; --n) {
    if (model(n) != at(n)) break;
    start = n;
  }
  fit.period_start = static_cast<unsigned>(start);
  fit.confirmed = (fit.n_max - 2 * L) - start;
  if (fit.confirmed < 0) fit.confirmed = 0;

  // Linear coefficients must be -mu1 * r * (E - r) for one shared mu1.
  auto weight = [&](long long cls) {
    long long t = fit.n_max - ((fit.n_max - cls) % L);  // deepest n in class
    Int r = 1;
    for (long long i = 0; i < t - fit.c; ++i) r = r * fit.p % fit.E;
    Int w = r * (fit.E - r);
    return Rat(w);
  };
  fit.shape_rejected = !(fit.mu > Rat(0));
  Rat w0 = weight(b % L);
  fit.mu1 = w0 == Rat(0) ? Rat(0) : -fit.beta[jd] / w0;
  for (long long j = 0; j < L; ++j) {
    const size_t cls = static_cast<size_t>((fit.n_max - j) % L);
    if (fit.beta[cls] != -fit.mu1 * weight(cls)) fit.shape_rejected = true;
  }
  return fit;
}

inline ZDFit analyze_zd(const ZDInput& in, unsigned n_max,
                        long long dense_limit = kDefaultDenseLimit,
                        const ZDColengthHook& lookup = {}) {
  in.validate();
  std::vector<Int> e;
  e.reserve(n_max + 1);
  for (unsigned n = 0; n <= n_max; ++n) e.push_back(en_zd(in, n, dense_limit, lookup));
  return fit_zd(in.h.prime(), in.D, e);
}

}  // namespace hk
