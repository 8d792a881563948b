#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hk/discover.hpp"

namespace hk {

struct ExprOptions {
  unsigned depth = 3;
  long long dense_limit = kDefaultDenseLimit;
  DiscoverOptions discover = {};
  // plug-in sampler, e.g. a cache-backed one; defaults to sample_phi
  std::function<GridFn(const Poly&, unsigned, long long)> sample = {};
};

namespace detail {

struct ExprToken {
  enum Kind { Name, Number, Plus, Star, Caret, Open, Close } kind;
  std::string text;
};

inline bool is_name_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
inline bool is_name_char(char c) { return is_name_start(c) || std::isdigit((unsigned char)c); }

inline std::vector<ExprToken> expr_tokens(const std::string& s) {
  std::vector<ExprToken> out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace((unsigned char)c)) { ++i; continue; }
    if (is_name_start(c)) {
      size_t j = i;
      while (j < s.size() && is_name_char(s[j])) ++j;
      out.push_back({ExprToken::Name, s.substr(i, j - i)});
      i = j;
    } else if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
      out.push_back({ExprToken::Number, s.substr(i, j - i)});
      i = j;
    } else if (c == '+') { out.push_back({ExprToken::Plus, "+"}); ++i; }
    else if (c == '*') { out.push_back({ExprToken::Star, "*"}); ++i; }
    else if (c == '^') { out.push_back({ExprToken::Caret, "^"}); ++i; }
    else if (c == '(') { out.push_back({ExprToken::Open, "("}); ++i; }
    else if (c == ')') { out.push_back({ExprToken::Close, ")"}); ++i; }
    else throw std::invalid_argument(std::string("unexpected character '") + c + "' in expression");
  }
  return out;
}

// Sorted unique identifiers appearing in a polynomial literal.
inline std::vector<std::string> poly_vars(const std::string& text) {
  std::vector<std::string> vars;
  size_t i = 0;
  while (i < text.size()) {
    if (is_name_start(text[i])) {
      size_t j = i;
      while (j < text.size() && is_name_char(text[j])) ++j;
      std::string v = text.substr(i, j - i);
      bool seen = false;
      for (const auto& w : vars) seen = seen || w == v;
      if (!seen) vars.push_back(v);
      i = j;
    } else {
      ++i;
    }
  }
  std::sort(vars.begin(), vars.end());
  return vars;
}

}  // namespace detail

// A series request is a list of declarations "name = poly ;" followed by one
// expression over the declared names.  Every use of a name stands for a copy
// of its polynomial in a fresh block of variables, so '+' joins summands that
// the solver treats as separate tensor factors, '*' multiplies polynomials
// across disjoint blocks (grid rule phi_fg = phi_f + phi_g - phi_f*phi_g),
// and '^' raises one polynomial to a power inside its own block (grid rule
// phi(t) -> phi(mt) capped at 1, variable count unchanged).  Sums are only
// meaningful between whole summands, so '+' cannot appear inside a factor.
// Each summand is sampled to the requested depth and run through rule
// discovery, so the result plugs straight into the series solver.
class SeriesExpr {
 public:
  SeriesExpr(const std::string& input, Prime p) : p_(p) {
    std::vector<std::string> segments;
    size_t start = 0;
    while (start <= input.size()) {
      size_t semi = input.find(';', start);
      if (semi == std::string::npos) semi = input.size();
      std::string seg = input.substr(start, semi - start);
      if (seg.find_first_not_of(" \t\r\n") != std::string::npos) segments.push_back(seg);
      start = semi + 1;
    }
    if (segments.empty()) throw std::invalid_argument("empty series request");
    for (size_t k = 0; k + 1 < segments.size(); ++k) add_decl(segments[k]);
    const std::string& last = segments.back();
    if (last.find('=') != std::string::npos)
      throw std::invalid_argument("series request ends with a declaration; append the expression to evaluate");
    expr_ = last;
  }

  // Factors in summand order; repeated factors share one rule system.
  std::vector<RuleSystem> systems(const ExprOptions& opt = {}) const {
    using detail::ExprToken;
    std::vector<ExprToken> toks = detail::expr_tokens(expr_);
    std::vector<std::pair<size_t, size_t>> spans;  // token ranges of summands
    size_t depth = 0, from = 0;
    for (size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].kind == ExprToken::Open) ++depth;
      else if (toks[i].kind == ExprToken::Close) {
        if (depth == 0) throw std::invalid_argument("unmatched ')' in expression");
        --depth;
      } else if (toks[i].kind == ExprToken::Plus && depth == 0) {
        spans.emplace_back(from, i);
        from = i + 1;
      }
    }
    if (depth != 0) throw std::invalid_argument("unmatched '(' in expression");
    spans.emplace_back(from, toks.size());

    // evaluate every summand before discovering, so malformed input is
    // rejected even when an earlier factor would be expensive or fail
    std::map<std::string, GridFn> samples;
    std::vector<std::pair<GridFn, int>> factors;
    for (auto [lo, hi] : spans) {
      size_t pos = lo;
      factors.push_back(eval_product(toks, pos, hi, opt, samples));
      if (pos != hi)
        throw std::invalid_argument("unexpected '" + toks[pos].text + "' in expression");
    }

    std::vector<RuleSystem> out;
    std::vector<size_t> first_at;  // factors[k] -> index of its first occurrence
    for (size_t k = 0; k < factors.size(); ++k) {
      size_t idx = out.size();
      for (size_t j = 0; j < k; ++j)
        if (factors[j].second == factors[k].second && factors[j].first == factors[k].first) {
          idx = first_at[j];
          break;
        }
      if (idx == out.size()) out.push_back(discover_rules(factors[k].first, factors[k].second, opt.discover));
      else out.push_back(out[idx]);
      first_at.push_back(idx);
    }
    return out;
  }

  const std::vector<std::pair<std::string, Poly>>& declarations() const { return decls_; }
  const std::string& expression() const { return expr_; }

 private:
  void add_decl(const std::string& seg) {
    size_t eq = seg.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("declaration without '=': " + seg);
    std::string name;
    for (char c : seg.substr(0, eq))
      if (!std::isspace((unsigned char)c)) name += c;
    if (name.empty() || !detail::is_name_start(name[0]))
      throw std::invalid_argument("bad declaration name: '" + name + "'");
    for (char c : name)
      if (!detail::is_name_char(c))
        throw std::invalid_argument("bad declaration name: '" + name + "'");
    for (const auto& [n, f] : decls_)
      if (n == name) throw std::invalid_argument("duplicate declaration of '" + name + "'");
    std::string body = seg.substr(eq + 1);
    std::vector<std::string> vars = detail::poly_vars(body);
    if (vars.empty())
      throw std::invalid_argument("declaration of '" + name + "' mentions no variables");
    decls_.emplace_back(name, poly_parse(body, p_, vars));
  }

  const Poly& lookup(const std::string& name) const {
    for (const auto& [n, f] : decls_)
      if (n == name) return f;
    throw std::invalid_argument("undeclared name '" + name + "' in expression");
  }

  // product := power ('*' power)*   factors live in disjoint variable blocks
  std::pair<GridFn, int> eval_product(const std::vector<detail::ExprToken>& toks,
                                      size_t& pos, size_t end, const ExprOptions& opt,
                                      std::map<std::string, GridFn>& samples) const {
    using detail::ExprToken;
    auto [grid, s] = eval_power(toks, pos, end, opt, samples);
    while (pos < end && toks[pos].kind == ExprToken::Star) {
      ++pos;
      auto [g2, s2] = eval_power(toks, pos, end, opt, samples);
      grid = phi_product(grid, g2);
      s += s2;
    }
    if (pos < end && toks[pos].kind == ExprToken::Plus)
      throw std::invalid_argument("'+' only separates top-level summands");
    return {grid, s};
  }

  // power := atom ('^' number)*   the power stays inside one variable block
  std::pair<GridFn, int> eval_power(const std::vector<detail::ExprToken>& toks,
                                    size_t& pos, size_t end, const ExprOptions& opt,
                                    std::map<std::string, GridFn>& samples) const {
    using detail::ExprToken;
    auto [grid, s] = eval_atom(toks, pos, end, opt, samples);
    while (pos < end && toks[pos].kind == ExprToken::Caret) {
      ++pos;
      if (pos >= end || toks[pos].kind != ExprToken::Number)
        throw std::invalid_argument("'^' must be followed by a positive integer");
      long long k = 0;
      try {
        k = std::stoll(toks[pos].text);
      } catch (const std::out_of_range&) {
        k = 0;
      }
      ++pos;
      if (k < 1 || k > 1000000)
        throw std::invalid_argument("power out of range (1..1000000)");
      grid = phi_power(grid, k);
    }
    return {grid, s};
  }

  std::pair<GridFn, int> eval_atom(const std::vector<detail::ExprToken>& toks,
                                   size_t& pos, size_t end, const ExprOptions& opt,
                                   std::map<std::string, GridFn>& samples) const {
    using detail::ExprToken;
    if (pos >= end) throw std::invalid_argument("expression ends where a name was expected");
    const ExprToken& t = toks[pos];
    if (t.kind == ExprToken::Name) {
      ++pos;
      auto it = samples.find(t.text);
      if (it == samples.end()) {
        const Poly& f = lookup(t.text);
        GridFn g = opt.sample ? opt.sample(f, opt.depth, opt.dense_limit)
                              : sample_phi(f, opt.depth, opt.dense_limit);
        it = samples.emplace(t.text, std::move(g)).first;
      }
      return {it->second, static_cast<int>(lookup(t.text).nvars())};
    }
    if (t.kind == ExprToken::Open) {
      ++pos;
      auto res = eval_product(toks, pos, end, opt, samples);
      if (pos >= end || toks[pos].kind != ExprToken::Close)
        throw std::invalid_argument("unmatched '(' in expression");
      ++pos;
      return res;
    }
    throw std::invalid_argument("unexpected '" + t.text + "' in expression");
  }

  Prime p_;
  std::vector<std::pair<std::string, Poly>> decls_;
  std::string expr_;
};

inline std::vector<RuleSystem> systems_from_expression(const std::string& input, Prime p,
                                                       const ExprOptions& opt = {}) {
  return SeriesExpr(input, p).systems(opt);
}

}  // namespace hk
