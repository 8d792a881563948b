#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "hk/fp.hpp"
#include "hk/gamma.hpp"

namespace hk {

// Brute-force product oracle: d_a corresponds to the nilpotent Jordan block
// of size a, and d_a d_b is the Jordan type of J_a (x) I + I (x) J_b over
// F_p. This shares nothing with the structure-constant recursion, so the two
// must agree wherever both are defined.

inline constexpr long long kOracleIndexBound = 60;

namespace detail {

// Reduction by a runtime modulus without a hardware divide.
struct FastMod {
  uint32_t p;
  uint64_t m;
  explicit FastMod(uint32_t p_) : p(p_), m(~uint64_t(0) / p_ + 1) {}
  uint32_t mod(uint64_t x) const {
    uint64_t low = m * x;
    return static_cast<uint32_t>((static_cast<unsigned __int128>(low) * p) >> 64);
  }
};

// rank of N^k where N = J_a (x) I + I (x) J_b, computed grade by grade:
// N^k sends e_i (x) e_j (grade i+j) into grade i+j+k with coefficients
// binom(k, i'-i) mod p. The slices at grades g and a+b-2-k-g have equal rank
// (the coordinate flip of V_a (x) V_b turns one into the transpose of the
// other), so only the lower half is eliminated.
inline long long kronecker_power_rank(uint32_t p, long long a, long long b, long long k) {
  if (k == 0) return a * b;
  auto binom = binomials_mod(static_cast<unsigned>(k), p);
  const auto& row = binom[static_cast<size_t>(k)];
  const FastMod fm(p);
  const long long top = a + b - 2 - k;
  long long rank = 0;
  for (long long g = 0; 2 * g <= top; ++g) {
    // source pairs (i, g-i), dest pairs (i', g+k-i').
    long long s_lo = std::max<long long>(0, g - b + 1);
    long long s_hi = std::min(a - 1, g);
    long long h = g + k;
    long long d_lo = std::max<long long>(0, h - b + 1);
    long long d_hi = std::min(a - 1, h);
    long long ns = s_hi - s_lo + 1, nd = d_hi - d_lo + 1;
    if (ns <= 0 || nd <= 0) continue;
    // Row echelon with the shorter side as rows.
    bool flip = ns > nd;
    size_t nr = static_cast<size_t>(flip ? nd : ns);
    size_t nc = static_cast<size_t>(flip ? ns : nd);
    std::vector<std::vector<uint32_t>> m(nr, std::vector<uint32_t>(nc, 0));
    for (long long s = 0; s < ns; ++s)
      for (long long d = 0; d < nd; ++d) {
        long long t = (d_lo + d) - (s_lo + s);
        if (t < 0 || t > k) continue;
        uint32_t c = row[static_cast<size_t>(t)];
        if (flip)
          m[static_cast<size_t>(d)][static_cast<size_t>(s)] = c;
        else
          m[static_cast<size_t>(s)][static_cast<size_t>(d)] = c;
      }
    size_t rk = 0;
    for (size_t col = 0; col < nc && rk < nr; ++col) {
      size_t piv = rk;
      while (piv < nr && m[piv][col] == 0) ++piv;
      if (piv == nr) continue;
      std::swap(m[rk], m[piv]);
      uint32_t inv = inv_mod(m[rk][col], p);
      for (size_t j = col; j < nc; ++j)
        m[rk][j] = fm.mod(static_cast<uint64_t>(m[rk][j]) * inv);
      for (size_t r2 = rk + 1; r2 < nr; ++r2) {
        uint32_t c2 = m[r2][col];
        if (c2 == 0) continue;
        uint32_t c2n = p - c2;
        for (size_t j = col; j < nc; ++j)
          m[r2][j] = fm.mod(m[r2][j] + static_cast<uint64_t>(c2n) * m[rk][j]);
      }
      ++rk;
    }
    long long gm = top - g;
    rank += (gm == g ? 1 : 2) * static_cast<long long>(rk);
  }
  return rank;
}

// d_a d_b as a multiset of block sizes.
inline const std::map<long long, long long>& jordan_blocks(const Prime& pr, long long a,
                                                           long long b) {
  if (a > b) std::swap(a, b);
  static std::map<std::tuple<long long, long long, long long>, std::map<long long, long long>>
      cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(static_cast<long long>(pr.value()), a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<long long> ranks{a * b};  // ranks[k] = rank(N^k)
  for (long long k = 1; k <= a + b - 1 && ranks.back() != 0; ++k)
    ranks.push_back(kronecker_power_rank(pr.value(), a, b, k));
  if (ranks.back() != 0) throw std::logic_error("kronecker sum not nilpotent in time");
  ranks.resize(static_cast<size_t>(a + b + 1), 0);
  std::map<long long, long long> blocks;
  long long total = 0;
  for (long long sz = 1; sz <= a + b - 1; ++sz) {
    long long c = ranks[static_cast<size_t>(sz - 1)] - 2 * ranks[static_cast<size_t>(sz)] +
                  ranks[static_cast<size_t>(sz + 1)];
    if (c < 0) throw std::logic_error("negative block multiplicity");
    if (c > 0) blocks[sz] = c;
    total += c * sz;
  }
  if (total != a * b) throw std::logic_error("jordan type does not fill the module");
  return cache.emplace(key, std::move(blocks)).first->second;
}

}  // namespace detail

inline GammaVec oracle_mul(const GammaVec& u, const GammaVec& v) {
  if (u.prime() != v.prime()) throw std::invalid_argument("mixed characteristics");
  if (!u.is_integral() || !v.is_integral())
    throw std::invalid_argument("oracle_mul needs integer coefficients");
  if (u.max_index() > kOracleIndexBound || v.max_index() > kOracleIndexBound)
    throw std::invalid_argument("oracle_mul index bound exceeded");
  Prime p = u.prime();

  // l_i = (-1)^i (d_{i+1} - d_i).
  auto to_delta = [](const GammaVec& w) {
    std::map<long long, Int> d;
    for (const auto& [i, x] : w.coeffs()) {
      Int c = rat_num(x);
      if (i % 2 != 0) c = -c;
      d[i + 1] += c;
      d[i] -= c;
    }
    d.erase(0);  // d_0 is the zero module
    for (auto it = d.begin(); it != d.end();)
      it = it->second == 0 ? d.erase(it) : std::next(it);
    return d;
  };
  auto du = to_delta(u), dv = to_delta(v);

  std::map<long long, Int> prod;  // delta basis
  for (const auto& [a, ca] : du)
    for (const auto& [b, cb] : dv) {
      Int c = ca * cb;
      for (const auto& [sz, mult] : detail::jordan_blocks(p, a, b)) prod[sz] += c * mult;
    }

  GammaVec r(p);
  for (const auto& [m, c] : prod) {
    if (c == 0) continue;
    Rat rc(c);
    for (long long i = 0; i < m; ++i) r.add(i, i % 2 == 0 ? rc : -rc);
  }
  return r;
}

}  // namespace hk
