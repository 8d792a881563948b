#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hk/fp.hpp"

namespace hk {

using Exps = std::vector<unsigned>;

// Graded lexicographic: total degree first, then exponent vector, both
// descending so the leading term comes first in iteration order.
struct GrlexGreater {
  bool operator()(const Exps& a, const Exps& b) const {
    unsigned da = std::accumulate(a.begin(), a.end(), 0u);
    unsigned db = std::accumulate(b.begin(), b.end(), 0u);
    if (da != db) return da > db;
    return a > b;
  }
};

// Sparse polynomial over F_p with a fixed ordered variable list. Coefficients
// are residues in [1, p); zero coefficients are never stored.
class Poly {
 public:
  using TermMap = std::map<Exps, uint32_t, GrlexGreater>;

  Poly(Prime p, std::vector<std::string> vars) : p_(p), vars_(std::move(vars)) {
    for (const auto& v : vars_)
      if (std::count(vars_.begin(), vars_.end(), v) > 1)
        throw std::invalid_argument("duplicate variable name: " + v);
  }

  static Poly constant(Prime p, std::vector<std::string> vars, uint32_t c) {
    Poly f(p, std::move(vars));
    f.add_term(Exps(f.vars_.size(), 0), c);
    return f;
  }

  Prime prime() const { return p_; }
  const std::vector<std::string>& vars() const { return vars_; }
  size_t nvars() const { return vars_.size(); }
  const TermMap& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }

  void add_term(const Exps& e, uint32_t c) {
    if (e.size() != vars_.size()) throw std::invalid_argument("exponent arity mismatch");
    c %= p_.value();
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second = add_mod(it->second, c, p_.value());
      if (it->second == 0) terms_.erase(it);
    }
  }

  bool is_zero() const { return terms_.empty(); }

  uint32_t constant_term() const {
    auto it = terms_.find(Exps(vars_.size(), 0));
    return it == terms_.end() ? 0u : it->second;
  }

  // Unit of the power series ring: nonzero constant term.
  bool is_unit() const { return constant_term() != 0; }

  bool is_monomial() const { return terms_.size() == 1; }

  long total_degree() const {
    if (is_zero()) return -1;
    long d = 0;
    for (const auto& [e, c] : terms_)
      d = std::max<long>(d, std::accumulate(e.begin(), e.end(), 0u));
    return d;
  }

  long degree_in(size_t var_idx) const {
    if (is_zero()) return -1;
    long d = 0;
    for (const auto& [e, c] : terms_) d = std::max<long>(d, e[var_idx]);
    return d;
  }

  bool is_homogeneous() const {
    if (is_zero()) return true;
    long d = -1;
    for (const auto& [e, c] : terms_) {
      long t = std::accumulate(e.begin(), e.end(), 0u);
      if (d < 0) d = t;
      if (t != d) return false;
    }
    return true;
  }

  Poly operator+(const Poly& o) const {
    check_ring(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  Poly operator-(const Poly& o) const {
    check_ring(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, p_.value() - c);
    return r;
  }

  Poly operator*(const Poly& o) const {
    check_ring(o);
    Poly r(p_, vars_);
    Exps e(vars_.size());
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) {
        for (size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
        r.add_term(e, mul_mod(c1, c2, p_.value()));
      }
    return r;
  }

  // x_i -> x_i^p on every term; equals the p-th power map on F_p coefficients.
  Poly frobenius() const {
    Poly r(p_, vars_);
    for (const auto& [e, c] : terms_) {
      Exps pe(e);
      for (auto& x : pe) x *= p_.value();
      r.terms_.emplace(std::move(pe), c);
    }
    return r;
  }

  // f^m via the base-p splitting f^(p*k+r) = frobenius(f^k) * f^r, which keeps
  // intermediate term counts near the final size.
  Poly pow(unsigned long m) const {
    if (m == 0) return constant(p_, vars_, 1);
    if (m == 1) return *this;
    unsigned long k = m / p_.value(), r = m % p_.value();
    Poly acc = k ? pow(k).frobenius() : constant(p_, vars_, 1);
    for (unsigned long i = 0; i < r; ++i) acc = acc * (*this);
    return acc;
  }

  // Same exponents, new variable names (arity preserved).
  Poly renamed(std::vector<std::string> new_vars) const {
    if (new_vars.size() != vars_.size()) throw std::invalid_argument("rename arity mismatch");
    Poly r(p_, std::move(new_vars));
    r.terms_ = terms_;
    return r;
  }

  // Embed into a larger ring; old variable i becomes big_vars[offset + i].
  Poly embedded(std::vector<std::string> big_vars, size_t offset) const {
    if (offset + vars_.size() > big_vars.size())
      throw std::invalid_argument("embed window out of range");
    Poly r(p_, std::move(big_vars));
    for (const auto& [e, c] : terms_) {
      Exps be(r.vars_.size(), 0);
      for (size_t i = 0; i < e.size(); ++i) be[offset + i] = e[i];
      r.terms_.emplace(std::move(be), c);
    }
    return r;
  }

  // Canonical form: grlex-descending terms, residue coefficients, explicit
  // '*' and '^'. Serves as the cache key, so it must be injective.
  std::string to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      bool has_var = std::accumulate(e.begin(), e.end(), 0u) > 0;
      bool printed = false;
      if (c != 1 || !has_var) {
        s += std::to_string(c);
        printed = true;
      }
      for (size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (printed) s += "*";
        s += vars_[i];
        if (e[i] > 1) s += "^" + std::to_string(e[i]);
        printed = true;
      }
    }
    return s;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.p_ == b.p_ && a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

 private:
  void check_ring(const Poly& o) const {
    if (!(p_ == o.p_) || vars_ != o.vars_)
      throw std::invalid_argument("polynomial ring mismatch");
  }

  Prime p_;
  std::vector<std::string> vars_;
  TermMap terms_;
};

namespace detail {

class PolyParser {
 public:
  PolyParser(const std::string& text, Prime p, const std::vector<std::string>& vars)
      : text_(text), p_(p), vars_(vars) {}

  Poly parse() {
    Poly r = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("parse error at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool starts_factor() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '(';
  }

  Poly expr() {
    skip_ws();
    bool neg = false;
    if (peek_is('+')) ++pos_;
    else if (peek_is('-')) { ++pos_; neg = true; }
    Poly acc = term();
    if (neg) acc = Poly(p_, vars_) - acc;
    while (true) {
      if (peek_is('+')) {
        ++pos_;
        acc = acc + term();
      } else if (peek_is('-')) {
        ++pos_;
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Poly term() {
    Poly acc = factor();
    while (true) {
      if (peek_is('*')) {
        ++pos_;
        acc = acc * factor();
      } else if (starts_factor()) {
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  Poly factor() {
    Poly base = atom();
    if (peek_is('^')) {
      ++pos_;
      skip_ws();
      unsigned long e = uint_lit();
      base = base.pow(e);
    }
    return base;
  }

  Poly atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected variable, integer or '('");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly r = expr();
      if (!peek_is(')')) fail("expected ')'");
      ++pos_;
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      unsigned long v = uint_lit();
      return Poly::constant(p_, vars_, static_cast<uint32_t>(v % p_.value()));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) {
        pos_ = start;
        fail("unknown variable '" + name + "'");
      }
      Poly r(p_, vars_);
      Exps e(vars_.size(), 0);
      e[static_cast<size_t>(it - vars_.begin())] = 1;
      r.add_term(e, 1);
      return r;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  unsigned long uint_lit() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected unsigned integer");
    unsigned long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<unsigned long>(text_[pos_] - '0');
      if (v > 100000000ul) fail("integer literal too large");
      ++pos_;
    }
    return v;
  }

  const std::string& text_;
  Prime p_;
  const std::vector<std::string>& vars_;
  size_t pos_ = 0;
};

}  // namespace detail

inline Poly poly_parse(const std::string& text, Prime p, const std::vector<std::string>& vars) {
  return detail::PolyParser(text, p, vars).parse();
}

}  // namespace hk
