#pragma once

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

#include "hk/gridfn.hpp"
#include "hk/rules.hpp"

namespace hk {

struct DiscoverOptions {
  size_t max_members = 26;
};

namespace detail {

inline std::string member_name(size_t i) {
  std::string s;
  ++i;
  while (i) {
    s.insert(s.begin(), static_cast<char>('a' + (i - 1) % 26));
    i = (i - 1) / 26;
  }
  return s;
}

}  // namespace detail

// Builds the closed basis of coherent sequences generated by the sampled
// grid function and the rules expressing each block of p^s * shift(member)
// in that basis. Every slot comes out as zero, a Delta multiple, or one
// member plus a Delta multiple; anything else becomes a fresh member until
// the basis closes or the sample depth runs out.
inline RuleSystem discover_rules(const GridFn& phi, int s, DiscoverOptions opts = {}) {
  if (s < 1) throw std::invalid_argument("variable count must be at least 1");
  const Prime p = phi.p;
  CohSeq root = L_of(phi);
  if (root.depth() < 2)
    throw std::invalid_argument("discovery needs a sample of depth at least 2");
  const Rat scale(int_pow(Int(p.value()), static_cast<unsigned>(s)));

  std::vector<CohSeq> seqs{root};
  std::vector<std::string> names{detail::member_name(0)};
  std::vector<MemberRule> rules;
  std::deque<size_t> pending{0};

  auto add_member = [&](CohSeq seq) {
    if (seqs.size() >= opts.max_members)
      throw std::runtime_error("basis exceeded " + std::to_string(opts.max_members) +
                               " members without closing");
    seqs.push_back(std::move(seq));
    names.push_back(detail::member_name(seqs.size() - 1));
    pending.push_back(seqs.size() - 1);
    return seqs.size() - 1;
  };

  struct Hit {
    unsigned t;
    bool reflected;
    size_t j;
    Rat c;
  };

  while (!pending.empty()) {
    const size_t i = pending.front();
    pending.pop_front();
    if (seqs[i].depth() < 2)
      throw std::runtime_error(
          "basis did not close within the sampled depth; re-run with a deeper sample");
    auto slots = block_decompose(shift(seqs[i]) * scale);
    MemberRule rule{names[i], std::vector<SlotRule>(p.value())};
    for (size_t k = 0; k < slots.size(); ++k) {
      const CohSeq& v = slots[k];
      if (v.is_zero()) continue;
      const Rat c0 = v.u[0].alpha();
      if (v == delta_seq(p, v.depth()) * c0) {
        rule.slots[k].delta = c0;
        continue;
      }
      std::vector<Hit> hits;
      for (size_t j = 0; j < seqs.size(); ++j) {
        const unsigned t = std::min(v.depth(), seqs[j].depth());
        const CohSeq w = v.truncated(t);
        const CohSeq dt = delta_seq(p, t);
        for (bool refl : {false, true}) {
          CohSeq cand = seqs[j].truncated(t);
          if (refl) cand = reflect_seq(cand);
          const CohSeq diff = w - cand;
          const Rat c = diff.u[0].alpha();
          if (diff == dt * c) hits.push_back({t, refl, j, c});
        }
      }
      if (hits.empty()) {
        // Fresh member, stored with its Delta part stripped off.
        const size_t j = add_member(v - delta_seq(p, v.depth()) * c0);
        rule.slots[k].coeffs[names[j]] = 1;
        rule.slots[k].delta = c0;
        continue;
      }
      unsigned tmax = 0;
      for (const Hit& h : hits) tmax = std::max(tmax, h.t);
      std::vector<Hit> best;
      for (const Hit& h : hits)
        if (h.t == tmax) best.push_back(h);
      for (size_t a = 1; a < best.size(); ++a)
        if (best[a].c != best[0].c)
          throw std::runtime_error(
              "ambiguous match: increase the sampling depth to separate basis members");
      // Plain hits precede reflected ones for each member, so best.front()
      // references an existing member whenever the content allows it.
      std::sort(best.begin(), best.end(), [](const Hit& x, const Hit& y) {
        if (x.reflected != y.reflected) return !x.reflected;
        return x.j < y.j;
      });
      const Hit chosen = best.front();
      if (!chosen.reflected) {
        rule.slots[k].coeffs[names[chosen.j]] = 1;
        rule.slots[k].delta = chosen.c;
        continue;
      }
      // The slot matches a reflection: reuse a member with that content if
      // one exists, otherwise adopt the reflection as a member of its own at
      // the full depth of the original.
      CohSeq refl_seq = reflect_seq(seqs[chosen.j]);
      size_t target = seqs.size();
      for (size_t j = 0; j < seqs.size(); ++j) {
        const unsigned t = std::min(refl_seq.depth(), seqs[j].depth());
        if (seqs[j].truncated(t) == refl_seq.truncated(t)) {
          target = j;
          break;
        }
      }
      if (target == seqs.size()) target = add_member(std::move(refl_seq));
      rule.slots[k].coeffs[names[target]] = 1;
      rule.slots[k].delta = chosen.c;
    }
    if (rules.size() < seqs.size()) rules.resize(seqs.size());
    rules[i] = std::move(rule);
  }

  RuleSystem sys;
  sys.p = p.value();
  sys.s = s;
  sys.names = names;
  for (size_t i = 0; i < seqs.size(); ++i) {
    sys.alpha0[names[i]] = seqs[i].u[0].alpha();
    sys.seqs.emplace(names[i], seqs[i]);
  }
  if (rules.size() != seqs.size())
    throw std::logic_error("rule bookkeeping out of step with the basis");
  for (size_t i = 0; i < rules.size(); ++i)
    if (rules[i].elem != names[i])
      throw std::logic_error("rule bookkeeping out of step with the basis");
  sys.rules = std::move(rules);
  sys.validate();
  sys.verified_depth = static_cast<int>(verify_rules(sys));
  return sys;
}

}  // namespace hk
