#pragma once

#include <string>
#include <vector>

#include "hk/gamma.hpp"
#include "hk/ratfunc.hpp"
#include "hk/rules.hpp"

namespace hk {

namespace detail {

// Fraction-free determinant of a polynomial matrix.
inline ZPoly zp_det(std::vector<std::vector<ZPoly>> a) {
  const size_t n = a.size();
  if (n == 0) return ZPoly{Int(1)};
  ZPoly prev{Int(1)};
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    size_t piv = n;
    for (size_t r = k; r < n; ++r)
      if (!zp_is_zero(a[r][k])) {
        piv = r;
        break;
      }
    if (piv == n) return {};
    if (piv != k) {
      std::swap(a[piv], a[k]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j)
        a[i][j] = zp_divexact(zp_sub(zp_mul(a[k][k], a[i][j]), zp_mul(a[i][k], a[k][j])), prev);
      a[i][k] = {};
    }
    prev = a[k][k];
  }
  ZPoly det = a[n - 1][n - 1];
  if (sign < 0) det = zp_neg(det);
  return det;
}

// Degree <= 1 rational polynomial c0 + c1 z used while assembling the system.
struct LinPoly {
  Rat c0, c1;
};

}  // namespace detail

// The joint solution of the self-similarity equations: one rational function
// per tuple of basis members, one member drawn from each factor.
struct RSolution {
  long long p = 0;
  int s_tot = 0;
  std::vector<std::string> labels;
  std::vector<RatFunc> x;
  size_t root = 0;

  const RatFunc& root_x() const { return x.at(root); }
};

inline RSolution solve_r_system(const std::vector<RuleSystem>& systems) {
  if (systems.empty()) throw std::invalid_argument("need at least one rule system");
  const long long pv = systems[0].p;
  int s_tot = 0;
  for (const auto& sys : systems) {
    sys.validate();
    if (sys.p != pv) throw std::invalid_argument("mixed characteristics across factors");
    s_tot += sys.s;
  }
  const size_t r = systems.size();
  const Prime p(static_cast<unsigned>(pv));

  // Per factor: member count, alpha values, slot coefficient matrices and
  // delta terms, and the alpha-weighted column sums.
  std::vector<size_t> mcount(r);
  std::vector<std::vector<Rat>> alpha(r);
  // f[j][k][i][i2], e[j][k][i], fsum[j][k][i]
  std::vector<std::vector<std::vector<std::vector<Rat>>>> fco(r);
  std::vector<std::vector<std::vector<Rat>>> eco(r), fsum(r);
  for (size_t j = 0; j < r; ++j) {
    const RuleSystem& sys = systems[j];
    const size_t m = sys.size();
    mcount[j] = m;
    alpha[j].resize(m);
    for (size_t i = 0; i < m; ++i) alpha[j][i] = sys.alpha0.at(sys.names[i]);
    fco[j].assign(static_cast<size_t>(pv),
                  std::vector<std::vector<Rat>>(m, std::vector<Rat>(m, Rat(0))));
    eco[j].assign(static_cast<size_t>(pv), std::vector<Rat>(m, Rat(0)));
    fsum[j].assign(static_cast<size_t>(pv), std::vector<Rat>(m, Rat(0)));
    for (size_t i = 0; i < m; ++i) {
      const MemberRule& rule = sys.rules[i];
      for (size_t k = 0; k < rule.slots.size(); ++k) {
        eco[j][k][i] = rule.slots[k].delta;
        for (const auto& [name, c] : rule.slots[k].coeffs) {
          const size_t i2 = sys.index_of(name);
          fco[j][k][i][i2] = c;
          fsum[j][k][i] += c * alpha[j][i2];
        }
      }
    }
  }

  size_t ucount = 1;
  for (size_t j = 0; j < r; ++j) {
    if (ucount > 4096 / std::max<size_t>(mcount[j], 1))
      throw std::invalid_argument("too many basis member tuples");
    ucount *= mcount[j];
  }

  // Slot tuples weighted by the structure constant of the product of their
  // basis elements; zero weights drop out.
  std::vector<std::pair<std::vector<size_t>, Rat>> weighted;
  {
    double combos = 1;
    for (size_t j = 0; j < r; ++j) combos *= static_cast<double>(pv);
    if (combos > 1e6) throw std::invalid_argument("too many slot combinations");
    std::vector<size_t> k(r, 0);
    while (true) {
      GammaVec prod = GammaVec::lambda(p, static_cast<long long>(k[0]));
      for (size_t j = 1; j < r; ++j)
        prod = prod * GammaVec::lambda(p, static_cast<long long>(k[j]));
      const Rat g = prod.alpha();
      if (g != 0) weighted.emplace_back(k, g);
      size_t j = 0;
      while (j < r && ++k[j] == static_cast<size_t>(pv)) k[j++] = 0;
      if (j == r) break;
    }
  }

  auto tuple_of = [&](size_t idx) {
    std::vector<size_t> t(r);
    for (size_t j = r; j-- > 0;) {
      t[j] = idx % mcount[j];
      idx /= mcount[j];
    }
    return t;
  };

  const Int p_high = int_pow(Int(pv), static_cast<unsigned>(s_tot - 1));

  // x = w + z M x, solved as (I - z M) x = w by Cramer with fraction-free
  // determinants after clearing denominators row by row.
  std::vector<std::vector<Rat>> M(ucount, std::vector<Rat>(ucount, Rat(0)));
  std::vector<detail::LinPoly> w(ucount);
  for (size_t ti = 0; ti < ucount; ++ti) {
    const auto T = tuple_of(ti);
    Rat aprod(1);
    for (size_t j = 0; j < r; ++j) aprod *= alpha[j][T[j]];
    w[ti].c0 = aprod;
    Rat zc = -Rat(p_high) * aprod;
    for (const auto& [k, g] : weighted) {
      Rat ef(1), ff(1);
      for (size_t j = 0; j < r; ++j) {
        ef *= eco[j][k[j]][T[j]] + fsum[j][k[j]][T[j]];
        ff *= fsum[j][k[j]][T[j]];
      }
      zc += g * (ef - ff);
      for (size_t si = 0; si < ucount; ++si) {
        const auto S = tuple_of(si);
        Rat coeff = g;
        for (size_t j = 0; j < r && coeff != 0; ++j) coeff *= fco[j][k[j]][T[j]][S[j]];
        if (coeff != 0) M[ti][si] += coeff;
      }
    }
    w[ti].c1 = zc;
  }

  // Integer rows: scale row i of [I - zM | w] by the lcm of denominators.
  std::vector<std::vector<ZPoly>> A(ucount, std::vector<ZPoly>(ucount));
  std::vector<ZPoly> b(ucount);
  for (size_t i = 0; i < ucount; ++i) {
    Int l = 1;
    for (size_t j = 0; j < ucount; ++j) l = boost::multiprecision::lcm(l, rat_den(M[i][j]));
    l = boost::multiprecision::lcm(l, rat_den(w[i].c0));
    l = boost::multiprecision::lcm(l, rat_den(w[i].c1));
    for (size_t j = 0; j < ucount; ++j) {
      ZPoly e;
      e.push_back(i == j ? l : Int(0));
      e.push_back(-rat_num(M[i][j] * Rat(l)));
      zp_trim(e);
      A[i][j] = std::move(e);
    }
    ZPoly e;
    e.push_back(rat_num(w[i].c0 * Rat(l)));
    e.push_back(rat_num(w[i].c1 * Rat(l)));
    zp_trim(e);
    b[i] = std::move(e);
  }

  const ZPoly det = detail::zp_det(A);
  if (zp_is_zero(det)) throw std::logic_error("self-similarity system is singular");

  RSolution sol;
  sol.p = pv;
  sol.s_tot = s_tot;
  sol.root = 0;
  for (size_t ti = 0; ti < ucount; ++ti) {
    const auto T = tuple_of(ti);
    std::string label;
    for (size_t j = 0; j < r; ++j) {
      if (j) label += ".";
      label += systems[j].names[T[j]];
    }
    sol.labels.push_back(std::move(label));
    auto Ai = A;
    for (size_t i = 0; i < ucount; ++i) Ai[i][ti] = b[i];
    sol.x.push_back(RatFunc::from_parts(detail::zp_det(Ai), det));
  }
  return sol;
}

// Full series as a closed form: the root component divided by the geometric
// factor carrying the top-order growth.
inline RatFunc hks_sum(const std::vector<RuleSystem>& systems) {
  RSolution sol = solve_r_system(systems);
  RatFunc h = rf_div_geom(sol.root_x(), int_pow(Int(sol.p), static_cast<unsigned>(sol.s_tot - 1)));
  h.validate();
  return h;
}

// Leading coefficient of e_n against p^((s-1) n).
inline Rat hk_multiplicity(const RatFunc& hks, long long p, int s_tot) {
  if (s_tot < 1) throw std::invalid_argument("variable count must be at least 1");
  const Int c = int_pow(Int(p), static_cast<unsigned>(s_tot - 1));
  const Rat z0 = Rat(1) / Rat(c);
  if (zp_eval(hks.den, z0) != 0) return Rat(0);
  const ZPoly reduced = zp_divexact(hks.den, ZPoly{Int(1), -c});
  const Rat rest = zp_eval(reduced, z0);
  if (rest == 0)
    throw std::runtime_error("higher order pole: growth exceeds the expected order");
  return zp_eval(hks.num, z0) / rest;
}

// e_0..e_n from the closed form; every coefficient must be a nonnegative
// integer or the series cannot be a colength sequence.
inline std::vector<Int> en_dot(const RatFunc& hks, unsigned n_max) {
  auto coeffs = hks.taylor(n_max);
  std::vector<Int> e;
  e.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    if (!rat_is_int(c) || c < 0)
      throw std::logic_error("series expansion is not a nonnegative integer sequence");
    e.push_back(rat_num(c));
  }
  return e;
}

}  // namespace hk
