#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hk/poly.hpp"
#include "hk/rational.hpp"

namespace hk {

// colength(q, f) = dim_k k[x_1..x_s] / (x_1^q, .., x_s^q, f).
// Path selection: monomial and univariate inputs have closed forms; bivariate
// homogeneous inputs go through a per-degree-slice kernel scan (fast enough
// for q in the thousands); small boxes fall back to dense rank; other
// bivariate inputs use elimination over F_p[x]/(x^q) with x-valuation
// pivoting.

inline constexpr long long kDefaultDenseLimit = 10000;
inline constexpr long long kHardDenseCap = 100000;
inline constexpr long long kChainLimit = 512;
inline constexpr long long kSliceLimit = 20000;

struct ColengthStats {
  std::atomic<long long> evals{0};
  std::atomic<long long> dense_evals{0};
};

inline ColengthStats& colength_stats() {
  static ColengthStats s;
  return s;
}

namespace detail {

inline void check_box(long long q, const Prime& p) {
  if (q < 1) throw std::invalid_argument("q must be positive");
  long long t = q;
  while (t % p.value() == 0) t /= p.value();
  if (t != 1) throw std::invalid_argument("q must be a power of p");
}

// Drops terms with any exponent >= q.
inline Poly reduce_mod_box(const Poly& f, long long q) {
  Poly r(f.prime(), f.vars());
  for (const auto& [e, c] : f.terms()) {
    bool in_box = true;
    for (unsigned x : e)
      if (x >= static_cast<unsigned long long>(q)) { in_box = false; break; }
    if (in_box) r.add_term(e, c);
  }
  return r;
}

// Rank over F_p by online row echelon with delayed mod-p reduction. Row
// entries stay below 97 + n*96*96 < 2^32 for n <= 1e5, so a single axpy pass
// per pivot needs no intermediate reduction.
class OnlineRank {
 public:
  OnlineRank(size_t n, uint32_t p) : n_(n), p_(p), pivot_of_pos_(n, -1) {}

  // Consumes the row (reduces it in place against current pivots).
  void feed(std::vector<uint32_t>& row) {
    for (size_t pos = 0; pos < n_; ++pos) {
      uint32_t v = row[pos] % p_;
      if (v == 0) continue;
      int pi = pivot_of_pos_[pos];
      if (pi < 0) {
        for (auto& x : row) x %= p_;
        uint32_t inv = inv_mod(row[pos], p_);
        if (inv != 1)
          for (auto& x : row) x = mul_mod(x, inv, p_);
        pivot_of_pos_[pos] = static_cast<int>(pivots_.size());
        pivots_.push_back(row);
        return;
      }
      const std::vector<uint32_t>& piv = pivots_[static_cast<size_t>(pi)];
      uint32_t c = p_ - v;
      uint32_t* r = row.data() + pos;
      const uint32_t* s = piv.data() + pos;
      size_t len = n_ - pos;
      for (size_t i = 0; i < len; ++i) r[i] += c * s[i];
    }
  }

  size_t rank() const { return pivots_.size(); }

 private:
  size_t n_;
  uint32_t p_;
  std::vector<int> pivot_of_pos_;
  std::vector<std::vector<uint32_t>> pivots_;
};

// Dense rank of multiplication by f on the box with all sides q.
inline long long colength_dense(const Poly& fbox, long long q) {
  const uint32_t p = fbox.prime().value();
  const size_t s = fbox.nvars();
  size_t n = 1;
  for (size_t i = 0; i < s; ++i) n *= static_cast<size_t>(q);
  colength_stats().dense_evals++;

  // Mixed-radix strides: index = sum e_i * q^i.
  std::vector<size_t> stride(s, 1);
  for (size_t i = 1; i < s; ++i) stride[i] = stride[i - 1] * static_cast<size_t>(q);

  // Term offsets and per-variable shifts for box-overflow tests.
  struct Term {
    Exps e;
    size_t off;
    uint32_t c;
  };
  std::vector<Term> terms;
  for (const auto& [e, c] : fbox.terms()) {
    size_t off = 0;
    for (size_t i = 0; i < s; ++i) off += stride[i] * e[i];
    terms.push_back({e, off, c});
  }

  OnlineRank elim(n, p);
  std::vector<uint32_t> row(n);
  Exps src(s, 0);
  for (size_t idx = 0; idx < n; ++idx) {
    std::fill(row.begin(), row.end(), 0u);
    bool nonzero = false;
    for (const auto& t : terms) {
      bool fits = true;
      for (size_t i = 0; i < s; ++i)
        if (src[i] + t.e[i] >= static_cast<unsigned long long>(q)) { fits = false; break; }
      if (!fits) continue;
      row[idx + t.off] = add_mod(row[idx + t.off], t.c, p);
      nonzero = true;
    }
    if (nonzero) elim.feed(row);
    for (size_t i = 0; i < s; ++i) {
      if (++src[i] < static_cast<unsigned long long>(q)) break;
      src[i] = 0;
    }
  }
  return static_cast<long long>(n) - static_cast<long long>(elim.rank());
}

// Homogeneous bivariate case, one graded slice at a time. In degree d the
// image of multiplication by g is spanned by the windowed shifts t^m * H(t)
// where H collects the y-coefficients of g; the rank in the slice is the
// number of shifts minus the kernel dimension, and the kernel for slice d-1
// extends the kernel for slice d by one linear condition, so a single
// descending sweep with an echelon kernel basis covers every slice.
inline long long colength_homog_slices(const Poly& gbox, long long q) {
  const uint32_t p = gbox.prime().value();
  if (q > kSliceLimit) throw std::invalid_argument("colength: q too large for slice path");
  const long long D = gbox.total_degree();
  // H[w] = coefficient of x^(D-w) y^w; box reduction already dropped w >= q
  // and D-w >= q.
  std::vector<uint32_t> H(static_cast<size_t>(q), 0);
  for (const auto& [e, c] : gbox.terms()) H[e[1]] = c;

  // Slices d < q contribute min(d+1 - max(0, d-D+1), d+1).
  long long total = 0;
  long long dlow = std::min<long long>(D, q);
  total += dlow * (dlow + 1) / 2;            // d in [0, min(D,q)-1]: full slice d+1
  if (D < q) total += D * (q - D);           // d in [D, q-1]: dimension D

  if (D > 2 * q - 2) {
    // Every term of g lies outside the box; the high slices are all full.
    for (long long d = q; d <= 2 * q - 2; ++d) total += 2 * q - 1 - d;
    return total;
  }

  // Kernel basis for the high slices: each element is a polynomial P kept
  // only through the cached coefficient vector of P*H mod t^q, tagged with
  // deg P. Degrees stay distinct, so degree trims are exact restrictions.
  struct Elem {
    long long deg;
    std::vector<uint32_t> ph;
  };
  const long long M0 = 2 * q - 2 - D;  // max deg P at d = 2q-2
  std::vector<Elem> basis;
  basis.reserve(static_cast<size_t>(M0 + 1));
  for (long long m = 0; m <= M0; ++m) {
    Elem e;
    e.deg = m;
    e.ph.assign(static_cast<size_t>(q), 0u);
    for (long long w = 0; w + m < q; ++w) e.ph[static_cast<size_t>(w + m)] = H[static_cast<size_t>(w)];
    basis.push_back(std::move(e));
  }

  for (long long d = 2 * q - 2; d >= q; --d) {
    if (d < D) {
      // No shifts at all; the slice is untouched by the ideal.
      total += 2 * q - 1 - d;
      continue;
    }
    const long long M = d - D;
    // Trim degree bound (one step per slice below the first).
    while (!basis.empty() && basis.back().deg > M) basis.pop_back();
    // New window coordinate for this slice.
    const size_t cond = static_cast<size_t>(d - q + 1);
    int elim_idx = -1;
    for (size_t i = 0; i < basis.size(); ++i)
      if (basis[i].ph[cond] % p != 0) { elim_idx = static_cast<int>(i); break; }
    if (elim_idx >= 0) {
      Elem piv = std::move(basis[static_cast<size_t>(elim_idx)]);
      basis.erase(basis.begin() + elim_idx);
      uint32_t pv = piv.ph[cond] % p;
      uint32_t pv_inv = inv_mod(pv, p);
      for (auto& e : basis) {
        uint32_t v = e.ph[cond] % p;
        if (v == 0) continue;
        uint32_t c = p - mul_mod(v, pv_inv, p);
        uint32_t* r = e.ph.data();
        const uint32_t* sp = piv.ph.data();
        for (long long i = 0; i < q; ++i) r[i] = (r[i] + c * sp[i]) % p;
      }
    }
    const long long K = static_cast<long long>(basis.size());
    const long long rank = M + 1 - K;
    const long long B = 2 * q - 1 - d;
    if (rank < 0 || rank > B)
      throw std::logic_error("colength: slice rank out of range");
    total += B - rank;
  }
  return total;
}

// Element of (F_p[x]/(x^q))[y] / (y^q): y-degree indexed x-coefficient rows.
struct ChainElem {
  std::vector<std::vector<uint32_t>> c;  // c[j][i] = coeff of x^i y^j, values < p

  long long ydeg() const {
    for (long long j = static_cast<long long>(c.size()) - 1; j >= 0; --j)
      for (uint32_t v : c[static_cast<size_t>(j)])
        if (v) return j;
    return -1;
  }
};

inline long long xval(const std::vector<uint32_t>& a) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i]) return static_cast<long long>(i);
  return -1;
}

// r += m * a, truncated mod x^q.
inline void axpy_trunc(std::vector<uint32_t>& r, const std::vector<uint32_t>& m,
                       const std::vector<uint32_t>& a, uint32_t p) {
  const size_t q = r.size();
  for (size_t i = 0; i < a.size() && i < q; ++i) {
    if (!a[i]) continue;
    uint64_t ai = a[i];
    for (size_t j = 0; j < m.size() && i + j < q; ++j) {
      if (!m[j]) continue;
      r[i + j] = static_cast<uint32_t>((r[i + j] + ai * m[j]) % p);
    }
  }
}

// Power series inverse of a unit u mod x^len.
inline std::vector<uint32_t> series_inv(const std::vector<uint32_t>& u, size_t len, uint32_t p) {
  std::vector<uint32_t> inv(len, 0);
  uint32_t i0 = inv_mod(u[0], p);
  inv[0] = i0;
  for (size_t n = 1; n < len; ++n) {
    uint64_t acc = 0;
    for (size_t k = 1; k <= n && k < u.size(); ++k) acc += static_cast<uint64_t>(u[k]) * inv[n - k];
    inv[n] = mul_mod(static_cast<uint32_t>((p - acc % p) % p), i0, p);
  }
  return inv;
}

// General bivariate colength by standard-basis elimination over the chain
// ring R = F_p[x]/(x^q): lead terms x^v y^d are reduced with x-valuation
// pivoting, corners keep a staircase (d decreasing, v increasing), and each
// inserted corner spawns its x^q / y^q syzygies plus adjacent S-pairs.
class ChainEliminator {
 public:
  ChainEliminator(uint32_t p, long long q) : p_(p), q_(q) {}

  long long run(const Poly& gbox) {
    ChainElem g = to_elem(gbox);
    pending_.push_back(std::move(g));
    size_t guard = 0;
    while (!pending_.empty()) {
      if (++guard > 200000) throw std::logic_error("chain elimination failed to terminate");
      ChainElem f = std::move(pending_.back());
      pending_.pop_back();
      reduce_and_insert(std::move(f));
    }
    // Staircase height at y-degree d = valuation of the lowest corner with
    // ydeg <= d (corners sorted by descending ydeg); q where no corner applies.
    long long total = 0;
    for (long long d = 0; d < q_; ++d) {
      long long e = q_;
      for (const auto& c : corners_)
        if (c.d <= d) e = std::min(e, c.v);
      total += e;
    }
    return total;
  }

 private:
  struct Corner {
    long long d, v;
    ChainElem elem;
    std::vector<uint32_t> lead_inv;  // inverse of the unit part of the lead coeff
  };

  ChainElem to_elem(const Poly& g) const {
    ChainElem e;
    e.c.assign(static_cast<size_t>(q_), std::vector<uint32_t>(static_cast<size_t>(q_), 0));
    for (const auto& [exp, c] : g.terms()) e.c[exp[1]][exp[0]] = c;
    return e;
  }

  void reduce_and_insert(ChainElem f) {
    while (true) {
      long long d = f.ydeg();
      if (d < 0) return;
      long long v = xval(f.c[static_cast<size_t>(d)]);
      // Deepest corner with ydeg <= d has the smallest valuation among them.
      int best = -1;
      for (size_t i = 0; i < corners_.size(); ++i)
        if (corners_[i].d <= d && (best < 0 || corners_[i].d > corners_[best].d))
          best = static_cast<int>(i);
      if (best >= 0 && corners_[static_cast<size_t>(best)].v <= v) {
        reduce_top(f, corners_[static_cast<size_t>(best)], d, v);
        continue;
      }
      insert_corner(std::move(f), d, v);
      return;
    }
  }

  // Cancels the whole y^d coefficient of f against corner k.
  void reduce_top(ChainElem& f, const Corner& k, long long d, long long v) {
    const auto& lead = f.c[static_cast<size_t>(d)];
    // multiplier m = x^(v-kv) * unit(lead) * lead_inv(k), truncated.
    std::vector<uint32_t> unit(lead.begin() + v, lead.end());
    std::vector<uint32_t> m(static_cast<size_t>(q_), 0);
    {
      size_t shift = static_cast<size_t>(v - k.v);
      for (size_t i = 0; i < unit.size(); ++i) {
        if (!unit[i]) continue;
        for (size_t j = 0; j < k.lead_inv.size() && i + j + shift < static_cast<size_t>(q_); ++j)
          m[i + j + shift] = static_cast<uint32_t>(
              (m[i + j + shift] + static_cast<uint64_t>(unit[i]) * k.lead_inv[j]) % p_);
      }
    }
    long long dy = d - k.d;
    for (long long j = 0; j <= k.d; ++j) {
      const auto& src = k.elem.c[static_cast<size_t>(j)];
      auto& dst = f.c[static_cast<size_t>(j + dy)];
      // dst -= m * src: add (p-1)*m*src via negated multiplier.
      for (size_t i = 0; i < src.size(); ++i) {
        if (!src[i]) continue;
        uint64_t si = src[i];
        for (size_t t = 0; t < m.size() && i + t < static_cast<size_t>(q_); ++t) {
          if (!m[t]) continue;
          uint64_t sub = si * m[t] % p_;
          dst[i + t] = static_cast<uint32_t>((dst[i + t] + p_ - sub) % p_);
        }
      }
    }
    if (xval(f.c[static_cast<size_t>(d)]) >= 0)
      throw std::logic_error("chain reduction left the lead coefficient alive");
  }

  void insert_corner(ChainElem f, long long d, long long v) {
    // Shadowed corners (lead divisible by the new lead) get re-reduced.
    for (size_t i = corners_.size(); i-- > 0;) {
      if (corners_[i].d >= d && corners_[i].v >= v) {
        pending_.push_back(std::move(corners_[i].elem));
        corners_.erase(corners_.begin() + static_cast<long long>(i));
      }
    }
    Corner k;
    k.d = d;
    k.v = v;
    const auto& lead = f.c[static_cast<size_t>(d)];
    std::vector<uint32_t> unit(lead.begin() + v, lead.end());
    k.lead_inv = series_inv(unit, static_cast<size_t>(q_ - v), p_);
    k.elem = std::move(f);

    // x^q syzygy: x^(q-v) * elem has a dead lead.
    {
      ChainElem sy;
      sy.c.assign(static_cast<size_t>(q_), std::vector<uint32_t>(static_cast<size_t>(q_), 0));
      for (long long j = 0; j <= d; ++j)
        for (long long i = 0; i + (q_ - v) < q_; ++i)
          sy.c[static_cast<size_t>(j)][static_cast<size_t>(i + q_ - v)] =
              k.elem.c[static_cast<size_t>(j)][static_cast<size_t>(i)];
      pending_.push_back(std::move(sy));
    }
    // y^q syzygy: y^(q-d) * elem with y-degrees >= q dropped.
    {
      ChainElem sy;
      sy.c.assign(static_cast<size_t>(q_), std::vector<uint32_t>(static_cast<size_t>(q_), 0));
      for (long long j = 0; j < d; ++j)
        sy.c[static_cast<size_t>(j + q_ - d)] = k.elem.c[static_cast<size_t>(j)];
      pending_.push_back(std::move(sy));
    }
    // Adjacent S-pairs against staircase neighbours.
    for (const auto& other : corners_) {
      bool adjacent = true;
      for (const auto& third : corners_)
        if ((third.d - k.d) * (third.d - other.d) < 0) { adjacent = false; break; }
      if (!adjacent) continue;
      pending_.push_back(spair(k, other));
    }
    corners_.push_back(std::move(k));
  }

  ChainElem spair(const Corner& a, const Corner& b) const {
    // lcm of leads x^va y^da, x^vb y^db; both sides scaled to unit lead.
    long long d = std::max(a.d, b.d), v = std::max(a.v, b.v);
    ChainElem s;
    s.c.assign(static_cast<size_t>(q_), std::vector<uint32_t>(static_cast<size_t>(q_), 0));
    auto accum = [&](const Corner& k, bool negate) {
      // x^(v-kv) * lead_inv(k) * y^(d-kd) * elem
      std::vector<uint32_t> m(static_cast<size_t>(q_), 0);
      size_t shift = static_cast<size_t>(v - k.v);
      for (size_t j = 0; j < k.lead_inv.size() && j + shift < static_cast<size_t>(q_); ++j)
        m[j + shift] = k.lead_inv[j];
      for (long long j = 0; j <= k.d && j + d - k.d < q_; ++j) {
        auto& dst = s.c[static_cast<size_t>(j + d - k.d)];
        const auto& src = k.elem.c[static_cast<size_t>(j)];
        for (size_t i = 0; i < src.size(); ++i) {
          if (!src[i]) continue;
          uint64_t si = src[i];
          for (size_t t = 0; t < m.size() && i + t < static_cast<size_t>(q_); ++t) {
            if (!m[t]) continue;
            uint64_t add = si * m[t] % p_;
            if (negate) add = (p_ - add) % p_;
            dst[i + t] = static_cast<uint32_t>((dst[i + t] + add) % p_);
          }
        }
      }
    };
    accum(a, false);
    accum(b, true);
    return s;
  }

  uint32_t p_;
  long long q_;
  std::vector<Corner> corners_;
  std::vector<ChainElem> pending_;
};

}  // namespace detail

inline long long colength(const Poly& f, long long q,
                          long long dense_limit = kDefaultDenseLimit) {
  detail::check_box(q, f.prime());
  if (dense_limit > kHardDenseCap)
    throw std::invalid_argument("dense limit exceeds hard cap");
  colength_stats().evals++;
  const size_t s = f.nvars();
  Int box = int_pow(Int(q), static_cast<unsigned>(s));
  if (box > Int("9000000000000000000"))
    throw std::invalid_argument("colength: box size exceeds 64-bit range");
  const long long qs = static_cast<long long>(box);

  Poly fb = detail::reduce_mod_box(f, q);
  if (fb.is_zero()) return qs;
  if (fb.is_unit()) return 0;
  if (s == 0) return 0;  // nonzero constant already handled
  if (fb.is_monomial()) {
    const auto& [e, c] = *fb.terms().begin();
    long long free_box = 1;
    for (unsigned x : e) free_box *= std::max<long long>(0, q - x);
    return qs - free_box;
  }
  if (s == 1) {
    long long v = q;
    for (const auto& [e, c] : fb.terms()) v = std::min<long long>(v, e[0]);
    return v;
  }
  if (s == 2 && fb.is_homogeneous() && q <= kSliceLimit)
    return detail::colength_homog_slices(fb, q);
  if (qs <= dense_limit) return detail::colength_dense(fb, q);
  if (s == 2 && q <= kChainLimit)
    return detail::ChainEliminator(fb.prime().value(), q).run(fb);
  throw std::invalid_argument("colength: input too large for exact elimination paths");
}

// Brute-force e_n by dense rank on the full monomial box; no structural
// shortcuts, so it serves as the independent oracle.
inline long long direct_en(const Poly& f, unsigned n,
                           long long dense_limit = kDefaultDenseLimit) {
  if (dense_limit > kHardDenseCap)
    throw std::invalid_argument("dense limit exceeds hard cap");
  Int q = int_pow(Int(f.prime().value()), n);
  Int box = int_pow(q, static_cast<unsigned>(f.nvars()));
  if (box > dense_limit)
    throw std::invalid_argument("direct_en: box size " + box.str() + " exceeds dense limit");
  long long ql = static_cast<long long>(q);
  colength_stats().evals++;
  Poly fb = detail::reduce_mod_box(f, ql);
  if (fb.is_zero()) return static_cast<long long>(box);
  if (fb.is_unit()) return 0;
  return detail::colength_dense(fb, ql);
}

struct ColengthTable {
  long long q = 0;
  std::string f;  // canonical form of the input
  std::vector<long long> c;

  void validate(long long qs, size_t s, bool f_in_max_ideal) const {
    if (c.empty() || c[0] != 0) throw std::logic_error("colength table must start at 0");
    for (size_t a = 1; a < c.size(); ++a)
      if (c[a] < c[a - 1] || c[a] > qs)
        throw std::logic_error("colength table not monotone within the box");
    if (f_in_max_ideal) {
      size_t sat = static_cast<size_t>(s) * static_cast<size_t>(q - 1) + 1;
      for (size_t a = sat; a < c.size(); ++a)
        if (c[a] != qs) throw std::logic_error("colength table misses forced saturation");
    }
  }
};

// c_a = colength(q, f^a) for a = 0..amax. Powers are accumulated modulo the
// box; once a power vanishes there, every later entry is the full box.
inline ColengthTable colength_table(const Poly& f, long long q, long long amax,
                                    long long dense_limit = kDefaultDenseLimit,
                                    unsigned threads = 1) {
  detail::check_box(q, f.prime());
  if (amax < 0 || amax > 2 * q) throw std::invalid_argument("amax out of range [0, 2q]");
  const size_t s = f.nvars();
  Int box = int_pow(Int(q), static_cast<unsigned>(s));
  if (box > Int("9000000000000000000"))
    throw std::invalid_argument("colength_table: box size exceeds 64-bit range");
  const long long qs = static_cast<long long>(box);

  ColengthTable t;
  t.q = q;
  t.f = f.to_string();
  t.c.assign(static_cast<size_t>(amax) + 1, 0);

  std::vector<Poly> powers;
  powers.reserve(static_cast<size_t>(amax) + 1);
  powers.push_back(detail::reduce_mod_box(Poly::constant(f.prime(), f.vars(), 1), q));
  Poly fb = detail::reduce_mod_box(f, q);
  long long saturated_at = -1;
  for (long long a = 1; a <= amax; ++a) {
    Poly next = detail::reduce_mod_box(powers.back() * fb, q);
    if (next.is_zero() && !fb.is_unit()) { saturated_at = a; break; }
    powers.push_back(std::move(next));
  }

  long long upto = saturated_at < 0 ? amax : saturated_at - 1;
  auto work = [&](long long lo, long long hi) {
    for (long long a = lo; a <= hi; ++a)
      t.c[static_cast<size_t>(a)] = colength(powers[static_cast<size_t>(a)], q, dense_limit);
  };
  if (threads <= 1 || upto < 8) {
    work(0, upto);
  } else {
    std::vector<std::thread> pool;
    long long chunk = (upto + threads) / threads;
    for (unsigned i = 0; i < threads; ++i) {
      long long lo = i * chunk, hi = std::min<long long>(upto, lo + chunk - 1);
      if (lo > hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (long long a = upto + 1; a <= amax; ++a) t.c[static_cast<size_t>(a)] = qs;

  t.validate(qs, s, !fb.is_unit());
  return t;
}

}  // namespace hk
