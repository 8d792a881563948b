#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hk/colength.hpp"
#include "hk/fp.hpp"
#include "hk/poly.hpp"
#include "hk/rational.hpp"

namespace hk {

// Functions on the p-adic grid {i/p^N : 0 <= i <= p^N}, stored as exhaustive
// value lists so every comparison is exact.

inline long long pow_ll(long long b, unsigned e) {
  long long r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (r > 1000000 / b) throw std::invalid_argument("grid size limit exceeded");
    r *= b;
  }
  return r;
}

struct GridFn {
  Prime p;
  unsigned depth = 0;
  std::vector<Rat> values;  // index i holds the value at i/p^depth
  bool from_unit = false;   // input f had a nonzero constant term

  GridFn(Prime pr, unsigned N) : p(pr), depth(N) {
    values.assign(static_cast<size_t>(pow_ll(p.value(), N)) + 1, Rat(0));
  }

  long long grid() const { return static_cast<long long>(values.size()) - 1; }

  void check_shape() const {
    if (static_cast<long long>(values.size()) != pow_ll(p.value(), depth) + 1)
      throw std::logic_error("grid length does not match depth");
  }

  bool operator==(const GridFn& o) const {
    return p == o.p && depth == o.depth && values == o.values;
  }
  bool operator!=(const GridFn& o) const { return !(*this == o); }

  // Restriction to the coarser grid of depth M <= depth.
  GridFn restricted(unsigned M) const {
    if (M > depth) throw std::invalid_argument("cannot restrict to a deeper grid");
    GridFn r(p, M);
    long long step = grid() / r.grid();
    for (long long i = 0; i <= r.grid(); ++i)
      r.values[static_cast<size_t>(i)] = values[static_cast<size_t>(i * step)];
    r.from_unit = from_unit;
    return r;
  }
};

// phi values from a colength table: entry a is c_a / q^s.
inline GridFn phi_from_table(const ColengthTable& t, Prime p, unsigned s, unsigned depth) {
  GridFn g(p, depth);
  if (t.q != g.grid()) throw std::invalid_argument("table level does not match depth");
  if (static_cast<long long>(t.c.size()) < t.q + 1)
    throw std::invalid_argument("table too short for a full grid");
  Int qs = int_pow(Int(t.q), s);
  for (long long i = 0; i <= t.q; ++i)
    g.values[static_cast<size_t>(i)] = Rat(Int(t.c[static_cast<size_t>(i)]), qs);
  return g;
}

namespace detail {

// Shape checks: phi is nondecreasing in [0,1] and pinned at the ends.
inline void check_phi_shape(const GridFn& g, const Poly& f) {
  for (size_t i = 0; i + 1 < g.values.size(); ++i)
    if (g.values[i] > g.values[i + 1]) throw std::logic_error("phi sample not monotone");
  if (g.values.front() != 0) throw std::logic_error("phi sample nonzero at 0");
  if (!f.is_unit() && !f.is_zero() && f.constant_term() == 0 && g.values.back() != 1)
    throw std::logic_error("phi sample must reach 1");
}

}  // namespace detail

// phi_f(a/q) = q^{-s} colength(q, f^a) at q = p^N.
inline GridFn sample_phi(const Poly& f, unsigned N,
                         long long dense_limit = kDefaultDenseLimit) {
  long long q = pow_ll(f.prime().value(), N);
  ColengthTable t = colength_table(f, q, q, dense_limit);
  GridFn g = phi_from_table(t, f.prime(), static_cast<unsigned>(f.nvars()), N);
  g.from_unit = f.is_unit();
  detail::check_phi_shape(g, f);
  return g;
}

// (T_{q|b} phi)(t) = phi((t + b)/q) for q = p^m: magnification of one p-adic
// window, dropping m levels of depth.
inline GridFn transform_T(const GridFn& phi, unsigned m, long long b) {
  if (m > phi.depth) throw std::invalid_argument("transform level exceeds grid depth");
  long long q = pow_ll(phi.p.value(), m);
  if (b < 0 || b >= q) throw std::invalid_argument("window index out of range");
  GridFn r(phi.p, phi.depth - m);
  for (long long i = 0; i <= r.grid(); ++i)
    r.values[static_cast<size_t>(i)] = phi.values[static_cast<size_t>(i + b * r.grid())];
  return r;
}

inline GridFn reflect(const GridFn& phi) {
  GridFn r = phi;
  std::reverse(r.values.begin(), r.values.end());
  return r;
}

// Subtracts the affine interpolant through the endpoints.
inline GridFn normalize_mod_linear(const GridFn& phi) {
  GridFn r = phi;
  Rat v0 = phi.values.front();
  Rat slope = (phi.values.back() - v0) / Rat(phi.grid());
  for (long long i = 0; i <= r.grid(); ++i)
    r.values[static_cast<size_t>(i)] -= v0 + slope * Rat(i);
  return r;
}

// phi_{f^m}(t) = phi_f(m t) capped at 1.
inline GridFn phi_power(const GridFn& phi, long long m) {
  if (m <= 0) throw std::invalid_argument("power must be positive");
  GridFn r(phi.p, phi.depth);
  for (long long i = 0; i <= r.grid(); ++i)
    r.values[static_cast<size_t>(i)] =
        m * i <= phi.grid() ? phi.values[static_cast<size_t>(m * i)] : Rat(1);
  r.from_unit = phi.from_unit;
  return r;
}

// phi_{fg} = phi_f + phi_g - phi_f phi_g.
inline GridFn phi_product(const GridFn& a, const GridFn& b) {
  if (a.p != b.p || a.depth != b.depth)
    throw std::invalid_argument("phi_product shape mismatch");
  GridFn r(a.p, a.depth);
  for (size_t i = 0; i < r.values.size(); ++i)
    r.values[i] = a.values[i] + b.values[i] - a.values[i] * b.values[i];
  r.from_unit = a.from_unit && b.from_unit;
  return r;
}

inline GridFn grid_scale(const GridFn& a, const Rat& c) {
  GridFn r = a;
  for (auto& v : r.values) v *= c;
  return r;
}

inline GridFn grid_sub(const GridFn& a, const GridFn& b) {
  if (a.p != b.p || a.depth != b.depth) throw std::invalid_argument("grid shape mismatch");
  GridFn r = a;
  for (size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

// The identity function t on the grid.
inline GridFn identity_grid(Prime p, unsigned N) {
  GridFn g(p, N);
  for (long long i = 0; i <= g.grid(); ++i)
    g.values[static_cast<size_t>(i)] = Rat(i, g.grid());
  return g;
}

}  // namespace hk
