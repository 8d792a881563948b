#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hk {

// Characteristic of the base field. Only primes in [2, 97] are accepted; the
// bound keeps p^2 inside uint32 arithmetic everywhere.
class Prime {
 public:
  explicit Prime(unsigned p) : p_(p) {
    if (p < 2 || p > 97) throw std::invalid_argument("prime out of range [2,97]");
    for (unsigned d = 2; d * d <= p; ++d)
      if (p % d == 0) throw std::invalid_argument("not a prime: " + std::to_string(p));
  }
  unsigned value() const { return p_; }
  friend bool operator==(Prime a, Prime b) { return a.p_ == b.p_; }
  friend bool operator!=(Prime a, Prime b) { return a.p_ != b.p_; }

 private:
  unsigned p_;
};

inline uint32_t add_mod(uint32_t a, uint32_t b, uint32_t p) {
  uint32_t s = a + b;
  return s >= p ? s - p : s;
}

inline uint32_t sub_mod(uint32_t a, uint32_t b, uint32_t p) {
  return a >= b ? a - b : a + p - b;
}

inline uint32_t mul_mod(uint32_t a, uint32_t b, uint32_t p) { return (a * b) % p; }

inline uint32_t pow_mod(uint32_t a, uint64_t e, uint32_t p) {
  uint32_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul_mod(r, a, p);
    a = mul_mod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline uint32_t inv_mod(uint32_t a, uint32_t p) {
  a %= p;
  if (a == 0) throw std::domain_error("inverse of zero mod p");
  return pow_mod(a, p - 2, p);
}

// Pascal triangle mod p, rows 0..n inclusive.
inline std::vector<std::vector<uint32_t>> binomials_mod(unsigned n, uint32_t p) {
  std::vector<std::vector<uint32_t>> c(n + 1);
  for (unsigned i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1);
    for (unsigned j = 1; j < i; ++j) c[i][j] = add_mod(c[i - 1][j - 1], c[i - 1][j], p);
  }
  return c;
}

}  // namespace hk
