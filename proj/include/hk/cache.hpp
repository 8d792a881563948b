#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hk/colength.hpp"
#include "hk/gridfn.hpp"
#include "hk/poly.hpp"

namespace hk {

// Append-only JSON-lines store of colength values. Each line is one complete
// entry {p, s, f, q, a, len} keyed by prime, variable count, canonical
// polynomial string, box level, and exponent, so a crash leaves at worst one
// torn line, which the loader skips. Later lines win, which lets corrections
// be appended instead of rewriting the file. If the directory cannot be used
// the cache degrades to in-memory operation and records a warning.
class ColengthCache {
 public:
  // Hits are recomputed and compared when set; differences are recorded in
  // mismatches() and the recomputed value wins (and is appended).
  bool verify = false;
  // Worker threads for cold table sweeps.
  unsigned threads = 1;

  ColengthCache() = default;

  explicit ColengthCache(const std::string& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    path_ = (std::filesystem::path(dir) / "colengths.jsonl").string();
    load();
    std::ofstream probe(path_, std::ios::app);
    if (probe) persistent_ = true;
    else warnings_.push_back("cache not writable, continuing in memory: " + path_);
  }

  // colength(q, f^a), served from the store when present.
  long long get_or_compute(const Poly& f, long long q, long long a,
                           long long dense_limit = kDefaultDenseLimit) {
    if (a < 0) throw std::invalid_argument("exponent must be nonnegative");
    Key k{static_cast<long long>(f.prime().value()),
          static_cast<long long>(f.nvars()), f.to_string(), q, a};
    auto it = store_.find(k);
    if (it != store_.end()) {
      ++hits_;
      if (!verify) return it->second;
      long long fresh = colength(f.pow(static_cast<unsigned long>(a)), q, dense_limit);
      if (fresh != it->second) {
        record_mismatch(k, it->second, fresh);
        it->second = fresh;
        append_line(k, fresh);
      }
      return fresh;
    }
    ++misses_;
    long long v = colength(f.pow(static_cast<unsigned long>(a)), q, dense_limit);
    store_[k] = v;
    append_line(k, v);
    return v;
  }

  // c_a = colength(q, f^a) for a = 0..amax. A fully cached sweep is served
  // without any colength evaluation; otherwise one bulk pass fills the gaps.
  ColengthTable table(const Poly& f, long long q, long long amax,
                      long long dense_limit = kDefaultDenseLimit) {
    const std::string fs = f.to_string();
    const long long p = f.prime().value();
    const long long s = static_cast<long long>(f.nvars());
    ColengthTable t;
    t.q = q;
    t.f = fs;
    t.c.assign(static_cast<size_t>(amax) + 1, 0);

    bool complete = true;
    for (long long a = 0; a <= amax && complete; ++a) {
      auto it = store_.find(Key{p, s, fs, q, a});
      if (it == store_.end()) complete = false;
      else t.c[static_cast<size_t>(a)] = it->second;
    }
    if (complete && !verify) {
      ++hits_;
      Int box = int_pow(Int(q), static_cast<unsigned>(s));
      Poly fb = detail::reduce_mod_box(f, q);
      t.validate(static_cast<long long>(box), static_cast<size_t>(s), !fb.is_unit());
      return t;
    }

    ++misses_;
    ColengthTable fresh = colength_table(f, q, amax, dense_limit, threads);
    for (long long a = 0; a <= amax; ++a) {
      Key k{p, s, fs, q, a};
      long long v = fresh.c[static_cast<size_t>(a)];
      auto it = store_.find(k);
      if (it == store_.end()) {
        store_[k] = v;
        append_line(k, v);
      } else if (it->second != v) {
        record_mismatch(k, it->second, v);
        it->second = v;
        append_line(k, v);
      }
    }
    return fresh;
  }

  // Cached counterpart of sample_phi.
  GridFn sample(const Poly& f, unsigned N, long long dense_limit = kDefaultDenseLimit) {
    long long q = pow_ll(f.prime().value(), N);
    ColengthTable t = table(f, q, q, dense_limit);
    GridFn g = phi_from_table(t, f.prime(), static_cast<unsigned>(f.nvars()), N);
    g.from_unit = f.is_unit();
    detail::check_phi_shape(g, f);
    return g;
  }

  size_t size() const { return store_.size(); }
  long long hits() const { return hits_; }
  long long misses() const { return misses_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::vector<std::string>& mismatches() const { return mismatches_; }

 private:
  // (p, variable count, canonical polynomial, q, a)
  using Key = std::tuple<long long, long long, std::string, long long, long long>;

  void load() {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    size_t skipped = 0;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() ||
          !j.contains("p") || !j["p"].is_number_integer() ||
          !j.contains("s") || !j["s"].is_number_integer() ||
          !j.contains("f") || !j["f"].is_string() ||
          !j.contains("q") || !j["q"].is_number_integer() ||
          !j.contains("a") || !j["a"].is_number_integer() ||
          !j.contains("len") || !j["len"].is_number_integer()) {
        ++skipped;
        continue;
      }
      store_[Key{j["p"].get<long long>(), j["s"].get<long long>(),
                 j["f"].get<std::string>(), j["q"].get<long long>(),
                 j["a"].get<long long>()}] = j["len"].get<long long>();
    }
    if (skipped)
      warnings_.push_back(std::to_string(skipped) + " unreadable cache line(s) skipped");
  }

  void append_line(const Key& k, long long v) {
    if (!persistent_) return;
    nlohmann::ordered_json j;
    j["p"] = std::get<0>(k);
    j["s"] = std::get<1>(k);
    j["f"] = std::get<2>(k);
    j["q"] = std::get<3>(k);
    j["a"] = std::get<4>(k);
    j["len"] = v;
    std::string line = j.dump();
    line += '\n';
    // one buffered write per line keeps concurrent appends whole
    std::ofstream out(path_, std::ios::app);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) {
      persistent_ = false;
      warnings_.push_back("cache append failed, continuing in memory: " + path_);
    }
  }

  void record_mismatch(const Key& k, long long stored, long long fresh) {
    mismatches_.push_back("colength mismatch for p=" + std::to_string(std::get<0>(k)) +
                          " f=" + std::get<2>(k) + " q=" + std::to_string(std::get<3>(k)) +
                          " a=" + std::to_string(std::get<4>(k)) + ": stored " +
                          std::to_string(stored) + ", recomputed " + std::to_string(fresh));
  }

  std::string path_;
  bool persistent_ = false;
  std::map<Key, long long> store_;
  std::vector<std::string> warnings_;
  std::vector<std::string> mismatches_;
  long long hits_ = 0;
  long long misses_ = 0;
};

}  // namespace hk
