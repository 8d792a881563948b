#pragma once

#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hk/coherent.hpp"

namespace hk {

// One slot of a self-similarity rule: the named linear combination of basis
// members plus a multiple of the linear sequence Delta.
struct SlotRule {
  std::map<std::string, Rat> coeffs;
  Rat delta = 0;

  bool is_zero() const {
    if (delta != 0) return false;
    for (const auto& [k, v] : coeffs)
      if (v != 0) return false;
    return true;
  }
  bool operator==(const SlotRule& o) const = default;
};

struct MemberRule {
  std::string elem;
  std::vector<SlotRule> slots;

  bool operator==(const MemberRule& o) const = default;
};

// A closed basis of coherent sequences together with the rules expressing the
// p blocks of p^s * shift(member) back in the basis. names[0] is the root
// member carrying the original grid function.
struct RuleSystem {
  long long p = 0;
  int s = 1;
  std::vector<std::string> names;
  std::map<std::string, Rat> alpha0;
  std::vector<MemberRule> rules;
  int verified_depth = 0;

  // Sampled sequences backing the rules; runtime only, never serialized.
  std::map<std::string, CohSeq> seqs;

  size_t size() const { return names.size(); }

  size_t index_of(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw std::invalid_argument("unknown basis member '" + name + "'");
  }

  const MemberRule& rule_of(const std::string& name) const {
    return rules.at(index_of(name));
  }

  Int p_pow_s() const { return int_pow(Int(p), static_cast<unsigned>(s)); }

  void validate() const {
    if (p < 2 || p > std::numeric_limits<unsigned>::max())
      throw std::invalid_argument("characteristic out of range");
    (void)Prime(static_cast<unsigned>(p));
    if (s < 1 || s > 32) throw std::invalid_argument("variable count out of range");
    if (names.empty()) throw std::invalid_argument("empty basis");
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (n.empty()) throw std::invalid_argument("empty basis member name");
      if (!seen.insert(n).second)
        throw std::invalid_argument("duplicate basis member '" + n + "'");
    }
    for (const auto& n : names)
      if (!alpha0.count(n))
        throw std::invalid_argument("missing alpha0 for '" + n + "'");
    for (const auto& [n, v] : alpha0)
      if (!seen.count(n)) throw std::invalid_argument("alpha0 for unknown member '" + n + "'");
    if (rules.size() != names.size())
      throw std::invalid_argument("need exactly one rule per basis member");
    for (size_t i = 0; i < names.size(); ++i) {
      const MemberRule& r = rules[i];
      if (r.elem != names[i])
        throw std::invalid_argument("rules must follow basis order; found '" + r.elem +
                                    "' where '" + names[i] + "' was expected");
      if (r.slots.size() != static_cast<size_t>(p))
        throw std::invalid_argument("rule for '" + r.elem + "' needs exactly p slots");
      for (const auto& slot : r.slots)
        for (const auto& [n, v] : slot.coeffs)
          if (!seen.count(n))
            throw std::invalid_argument("rule for '" + r.elem +
                                        "' references unknown member '" + n + "'");
    }
  }

  nlohmann::ordered_json to_json() const {
    validate();
    nlohmann::ordered_json j;
    j["p"] = p;
    j["s"] = s;
    j["basis"] = names;
    nlohmann::ordered_json a0 = nlohmann::ordered_json::object();
    for (const auto& n : names) a0[n] = rat_to_short_string(alpha0.at(n));
    j["alpha0"] = std::move(a0);
    nlohmann::ordered_json rs = nlohmann::ordered_json::array();
    for (const auto& r : rules) {
      nlohmann::ordered_json rj;
      rj["elem"] = r.elem;
      nlohmann::ordered_json slots = nlohmann::ordered_json::array();
      for (size_t k = 0; k < r.slots.size(); ++k) {
        const SlotRule& slot = r.slots[k];
        if (slot.is_zero()) continue;
        nlohmann::ordered_json sj;
        sj["k"] = k;
        nlohmann::ordered_json cj = nlohmann::ordered_json::object();
        for (const auto& [n, v] : slot.coeffs)
          if (v != 0) cj[n] = rat_to_short_string(v);
        sj["coeffs"] = std::move(cj);
        sj["delta"] = rat_to_short_string(slot.delta);
        slots.push_back(std::move(sj));
      }
      rj["slots"] = std::move(slots);
      rs.push_back(std::move(rj));
    }
    j["rules"] = std::move(rs);
    if (verified_depth > 0) j["verified_depth"] = verified_depth;
    return j;
  }

  static RuleSystem from_json(const nlohmann::ordered_json& j) {
    auto need = [&](const char* key) -> const nlohmann::ordered_json& {
      if (!j.contains(key))
        throw std::invalid_argument(std::string("rule file missing '") + key + "'");
      return j.at(key);
    };
    auto as_rat = [](const nlohmann::ordered_json& v) -> Rat {
      if (v.is_number_integer()) return Rat(v.get<long long>());
      if (v.is_string()) return rat_from_string(v.get<std::string>());
      throw std::invalid_argument("rational values must be integers or 'a/b' strings");
    };

    RuleSystem sys;
    sys.p = need("p").get<long long>();
    sys.s = need("s").get<int>();
    for (const auto& n : need("basis")) sys.names.push_back(n.get<std::string>());
    const auto& a0 = need("alpha0");
    for (const auto& n : sys.names) {
      if (!a0.contains(n)) throw std::invalid_argument("missing alpha0 for '" + n + "'");
      sys.alpha0[n] = as_rat(a0.at(n));
    }
    for (const auto& rj : need("rules")) {
      MemberRule r;
      if (!rj.contains("elem")) throw std::invalid_argument("rule entry missing 'elem'");
      r.elem = rj.at("elem").get<std::string>();
      r.slots.assign(static_cast<size_t>(sys.p), SlotRule{});
      if (rj.contains("slots")) {
        std::set<long long> used;
        for (const auto& sj : rj.at("slots")) {
          if (!sj.contains("k")) throw std::invalid_argument("slot entry missing 'k'");
          long long k = sj.at("k").get<long long>();
          if (k < 0 || k >= sys.p)
            throw std::invalid_argument("slot index out of range in rule for '" + r.elem + "'");
          if (!used.insert(k).second)
            throw std::invalid_argument("duplicate slot " + std::to_string(k) +
                                        " in rule for '" + r.elem + "'");
          SlotRule& slot = r.slots[static_cast<size_t>(k)];
          if (sj.contains("coeffs"))
            for (const auto& [n, v] : sj.at("coeffs").items()) slot.coeffs[n] = as_rat(v);
          if (sj.contains("delta")) slot.delta = as_rat(sj.at("delta"));
        }
      }
      sys.rules.push_back(std::move(r));
    }
    if (j.contains("verified_depth")) sys.verified_depth = j.at("verified_depth").get<int>();
    sys.validate();
    return sys;
  }

  bool operator==(const RuleSystem& o) const {
    return p == o.p && s == o.s && names == o.names && alpha0 == o.alpha0 && rules == o.rules;
  }
};

// Checks every slot rule against the sampled sequences and returns the depth
// through which all of them were confirmed. Throws on the first mismatch.
inline unsigned verify_rules(const RuleSystem& sys) {
  sys.validate();
  for (const auto& n : sys.names)
    if (!sys.seqs.count(n))
      throw std::invalid_argument("no sampled sequence for member '" + n + "'");
  const Rat scale(sys.p_pow_s());
  unsigned overall = std::numeric_limits<unsigned>::max();
  for (const auto& rule : sys.rules) {
    const CohSeq& um = sys.seqs.at(rule.elem);
    if (um.depth() < 1)
      throw std::invalid_argument("member '" + rule.elem + "' needs depth at least 1");
    auto slots = block_decompose(shift(um) * scale);
    for (size_t k = 0; k < slots.size(); ++k) {
      const SlotRule& want = rule.slots[k];
      unsigned t = um.depth() - 1;
      for (const auto& [n, c] : want.coeffs)
        if (c != 0) t = std::min(t, sys.seqs.at(n).depth());
      CohSeq rhs = delta_seq(um.p, t) * want.delta;
      for (const auto& [n, c] : want.coeffs)
        if (c != 0) rhs = rhs + sys.seqs.at(n).truncated(t) * c;
      if (slots[k].truncated(t) != rhs)
        throw std::runtime_error("rule mismatch for member '" + rule.elem + "' in slot " +
                                 std::to_string(k));
      overall = std::min(overall, t);
    }
  }
  return overall;
}

inline void rules_to_file(const RuleSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write rule file '" + path + "'");
  out << sys.to_json().dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing rule file '" + path + "'");
}

inline RuleSystem rules_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read rule file '" + path + "'");
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("bad JSON in '" + path + "': " + std::string(e.what()));
  }
  return RuleSystem::from_json(j);
}

inline std::string rules_to_string(const RuleSystem& sys) {
  std::ostringstream os;
  os << sys.p_pow_s().str() << "*S acts on [";
  for (size_t i = 0; i < sys.names.size(); ++i) os << (i ? ", " : "") << sys.names[i];
  os << "]\n";
  for (const auto& r : sys.rules) {
    os << r.elem << " -> ";
    bool any = false;
    for (size_t k = 0; k < r.slots.size(); ++k) {
      const SlotRule& slot = r.slots[k];
      if (slot.is_zero()) continue;
      if (any) os << ", ";
      os << "[" << k << "]";
      bool first = true;
      for (const auto& [n, c] : slot.coeffs) {
        if (c == 0) continue;
        os << (first ? " " : " + ") << rat_to_short_string(c) << "*" << n;
        first = false;
      }
      if (slot.delta != 0 || first)
        os << (first ? " " : " + ") << rat_to_short_string(slot.delta) << "*D";
      any = true;
    }
    if (!any) os << "0";
    os << "\n";
  }
  return os.str();
}

}  // namespace hk
