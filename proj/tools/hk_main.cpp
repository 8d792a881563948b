#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hk/cache.hpp"
#include "hk/coherent.hpp"
#include "hk/expr.hpp"
#include "hk/gamma.hpp"
#include "hk/gamma_oracle.hpp"
#include "hk/rules.hpp"
#include "hk/series.hpp"
#include "hk/zdh.hpp"

using nlohmann::ordered_json;

namespace {

struct CommonOpts {
  unsigned p = 0;
  unsigned depth = 3;
  unsigned n_max = 5;
  long long dense_limit = hk::kDefaultDenseLimit;
  std::string cache_dir;
  bool json = false;
  bool verify = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_depth, bool with_nmax) {
  cmd->add_option("--p", o.p, "field characteristic (a prime)")->required();
  if (with_depth)
    cmd->add_option("--depth", o.depth, "sampling depth N, grid step 1/p^N")
        ->capture_default_str();
  if (with_nmax)
    cmd->add_option("--n-max", o.n_max, "largest n to report")->capture_default_str();
  cmd->add_option("--dense-limit", o.dense_limit,
                  "largest box solved by the dense eliminator")
      ->capture_default_str();
  cmd->add_option("--cache-dir", o.cache_dir, "directory for the colength store");
  cmd->add_flag("--json", o.json, "machine-readable output");
  cmd->add_flag("--verify", o.verify, "recompute cache hits and report mismatches");
}

std::unique_ptr<hk::ColengthCache> open_cache(const CommonOpts& o) {
  if (o.cache_dir.empty() && !o.verify) return nullptr;
  auto cache = std::make_unique<hk::ColengthCache>(o.cache_dir);
  cache->verify = o.verify;
  return cache;
}

// Cache diagnostics go to stderr so result bytes stay identical across runs.
void report_cache(const hk::ColengthCache* cache) {
  if (!cache) return;
  for (const auto& w : cache->warnings()) std::cerr << "warning: " << w << "\n";
  for (const auto& m : cache->mismatches()) std::cerr << "warning: " << m << "\n";
}

hk::Poly parse_poly(const std::string& text, hk::Prime p) {
  std::vector<std::string> vars = hk::detail::poly_vars(text);
  if (vars.empty())
    throw std::invalid_argument("polynomial mentions no variables: '" + text + "'");
  return hk::poly_parse(text, p, vars);
}

std::vector<long long> zp_int_list(const hk::ZPoly& a) {
  std::vector<long long> out;
  for (const hk::Int& c : a) out.push_back(static_cast<long long>(c));
  return out;
}

ordered_json ratfunc_json(const hk::RatFunc& r) {
  ordered_json j;
  j["num"] = zp_int_list(r.num);
  j["den"] = zp_int_list(r.den);
  j["display"] = r.to_string();
  return j;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- en

int cmd_en(const CommonOpts& o, const std::string& poly_text) {
  hk::Prime p(o.p);
  hk::Poly f = parse_poly(poly_text, p);
  auto cache = open_cache(o);
  std::vector<long long> e;
  for (unsigned n = 0; n <= o.n_max; ++n) {
    long long q = hk::pow_ll(p.value(), n);
    e.push_back(cache ? cache->get_or_compute(f, q, 1, o.dense_limit)
                      : hk::colength(f, q, o.dense_limit));
  }
  if (o.json) {
    ordered_json j;
    j["p"] = o.p;
    j["f"] = f.to_string();
    j["e"] = e;
    emit(j);
  } else {
    std::cout << "e_n(" << f.to_string() << ") over F_" << o.p << "\n";
    for (unsigned n = 0; n <= o.n_max; ++n)
      std::cout << "e_" << n << " = " << e[n] << "\n";
  }
  report_cache(cache.get());
  return 0;
}

// ---------------------------------------------------------------- phi

int cmd_phi(const CommonOpts& o, const std::string& poly_text) {
  hk::Prime p(o.p);
  hk::Poly f = parse_poly(poly_text, p);
  auto cache = open_cache(o);
  hk::GridFn g = cache ? cache->sample(f, o.depth, o.dense_limit)
                       : hk::sample_phi(f, o.depth, o.dense_limit);
  if (o.json) {
    ordered_json j;
    j["p"] = o.p;
    j["f"] = f.to_string();
    j["depth"] = o.depth;
    j["q"] = g.grid();
    std::vector<std::string> vals;
    for (const hk::Rat& v : g.values) vals.push_back(hk::rat_to_short_string(v));
    j["phi"] = vals;
    emit(j);
  } else {
    std::cout << "phi(" << f.to_string() << ") on steps of 1/" << g.grid() << "\n";
    for (long long i = 0; i <= g.grid(); ++i)
      std::cout << i << "/" << g.grid() << "  "
                << hk::rat_to_short_string(g.values[static_cast<size_t>(i)]) << "\n";
  }
  report_cache(cache.get());
  return 0;
}

// ---------------------------------------------------------------- discover

int cmd_discover(const CommonOpts& o, const std::string& poly_text,
                 const std::string& rules_out) {
  hk::Prime p(o.p);
  hk::Poly f = parse_poly(poly_text, p);
  auto cache = open_cache(o);
  hk::GridFn g = cache ? cache->sample(f, o.depth, o.dense_limit)
                       : hk::sample_phi(f, o.depth, o.dense_limit);
  hk::RuleSystem sys = hk::discover_rules(g, static_cast<int>(f.nvars()));
  if (!rules_out.empty()) {
    hk::rules_to_file(sys, rules_out);
    if (o.json) {
      ordered_json j;
      j["written"] = rules_out;
      j["members"] = sys.size();
      emit(j);
    } else {
      std::cout << "wrote " << sys.size() << " member rule system to " << rules_out << "\n";
    }
  } else {
    std::cout << sys.to_json().dump(2) << "\n";
  }
  report_cache(cache.get());
  return 0;
}

// ---------------------------------------------------------------- series / mult

struct SeriesResult {
  std::vector<hk::RuleSystem> systems;
  hk::RatFunc hks;
  int s_tot = 0;
  hk::Rat mult;
};

SeriesResult eval_series(const CommonOpts& o, const std::string& expr,
                         const std::vector<std::string>& rules_in,
                         hk::ColengthCache* cache) {
  SeriesResult r;
  if (!rules_in.empty()) {
    for (const auto& path : rules_in) {
      hk::RuleSystem sys = hk::rules_from_file(path);
      if (sys.p != static_cast<long long>(o.p))
        throw std::invalid_argument("rules file " + path + " is for p=" +
                                    std::to_string(sys.p) + ", not p=" +
                                    std::to_string(o.p));
      r.systems.push_back(std::move(sys));
    }
  } else {
    hk::ExprOptions eo;
    eo.depth = o.depth;
    eo.dense_limit = o.dense_limit;
    if (cache)
      eo.sample = [cache](const hk::Poly& f, unsigned N, long long dl) {
        return cache->sample(f, N, dl);
      };
    r.systems = hk::systems_from_expression(expr, hk::Prime(o.p), eo);
  }
  for (const auto& sys : r.systems) r.s_tot += sys.s;
  r.hks = hk::hks_sum(r.systems);
  r.mult = hk::hk_multiplicity(r.hks, o.p, r.s_tot);
  return r;
}

int cmd_series(const CommonOpts& o, const std::string& expr,
               const std::vector<std::string>& rules_in, bool mult_only) {
  auto cache = open_cache(o);
  SeriesResult r = eval_series(o, expr, rules_in, cache.get());
  std::vector<hk::Int> e;
  if (!mult_only) e = hk::en_dot(r.hks, o.n_max);
  if (o.json) {
    ordered_json j;
    j["p"] = o.p;
    if (rules_in.empty()) j["expression"] = expr;
    else j["rules"] = rules_in;
    j["factors"] = r.systems.size();
    j["s_tot"] = r.s_tot;
    if (!mult_only) {
      j["hks"] = ratfunc_json(r.hks);
      std::vector<std::string> es;
      for (const hk::Int& v : e) es.push_back(v.str());
      j["e"] = es;
    }
    j["mult"] = hk::rat_to_short_string(r.mult);
    emit(j);
  } else if (mult_only) {
    std::cout << hk::rat_to_short_string(r.mult) << "\n";
  } else {
    std::cout << "HKS = " << r.hks.to_string() << "\n";
    std::cout << "mult = " << hk::rat_to_short_string(r.mult) << "\n";
    std::cout << "e:";
    for (const hk::Int& v : e) std::cout << " " << v.str();
    std::cout << "\n";
  }
  report_cache(cache.get());
  return 0;
}

// ---------------------------------------------------------------- zd

int cmd_zd(const CommonOpts& o, const std::string& poly_text, long long D) {
  hk::Prime p(o.p);
  hk::Poly h = parse_poly(poly_text, p);
  hk::ZDInput in{h, D};
  in.validate();
  auto cache = open_cache(o);
  hk::ZDColengthHook hook;
  if (cache) {
    auto* c = cache.get();
    long long dl = o.dense_limit;
    hook = [c, dl](const hk::Poly& hh, long long q, long long a) {
      return c->get_or_compute(hh, q, a, dl);
    };
  }
  std::vector<hk::Int> e;
  for (unsigned n = 0; n <= o.n_max; ++n)
    e.push_back(hk::en_zd(in, n, o.dense_limit, hook));

  bool fitted = true;
  hk::ZDFit fit;
  std::string fit_error;
  try {
    fit = hk::fit_zd(p, D, e);
  } catch (const std::invalid_argument& ex) {
    fitted = false;
    fit_error = ex.what();
  }

  if (o.json) {
    ordered_json j;
    j["p"] = o.p;
    j["D"] = D;
    j["h"] = h.to_string();
    std::vector<std::string> es;
    for (const hk::Int& v : e) es.push_back(v.str());
    j["e"] = es;
    if (fitted) {
      ordered_json fj;
      fj["c"] = fit.c;
      fj["E"] = fit.E;
      fj["L"] = fit.L;
      fj["mu"] = hk::rat_to_short_string(fit.mu);
      fj["mu1"] = hk::rat_to_short_string(fit.mu1);
      std::vector<std::string> bs, gs;
      for (const hk::Rat& v : fit.beta) bs.push_back(hk::rat_to_short_string(v));
      for (const hk::Rat& v : fit.gamma) gs.push_back(hk::rat_to_short_string(v));
      fj["beta"] = bs;
      fj["gamma"] = gs;
      fj["period_start"] = fit.period_start;
      fj["confirmed"] = fit.confirmed;
      fj["shape_rejected"] = fit.shape_rejected;
      j["fit"] = fj;
    } else {
      j["fit"] = nullptr;
      j["fit_error"] = fit_error;
    }
    emit(j);
  } else {
    std::cout << "z^" << D << " - (" << h.to_string() << ") over F_" << o.p << "\n";
    std::cout << "e:";
    for (const hk::Int& v : e) std::cout << " " << v.str();
    std::cout << "\n";
    if (fitted) {
      std::cout << "mu = " << hk::rat_to_short_string(fit.mu) << "\n";
      std::cout << "mu1 = " << hk::rat_to_short_string(fit.mu1) << "\n";
      for (size_t k = 0; k < fit.gamma.size(); ++k)
        std::cout << "gamma[" << k << "] = " << hk::rat_to_short_string(fit.gamma[k])
                  << "\n";
      std::cout << "period_start = " << fit.period_start << "\n";
      std::cout << "confirmed = " << fit.confirmed << "\n";
      if (fit.shape_rejected) std::cout << "shape_rejected = true\n";
    } else {
      std::cout << "fit: " << fit_error << "\n";
    }
  }
  report_cache(cache.get());
  return 0;
}

// ---------------------------------------------------------------- gamma

std::string gamma_str(const hk::GammaVec& v) {
  if (v.is_zero()) return "0";
  std::string s;
  for (const auto& [i, c] : v.coeffs()) {
    std::string cs = hk::rat_to_short_string(c);
    if (s.empty()) {
      if (cs == "1") s = "";
      else if (cs == "-1") s = "-";
      else s = cs + "*";
    } else {
      bool neg = !cs.empty() && cs[0] == '-';
      std::string abs = neg ? cs.substr(1) : cs;
      s += neg ? " - " : " + ";
      if (abs != "1") s += abs + "*";
    }
    s += "l" + std::to_string(i);
  }
  return s;
}

int cmd_gamma(const CommonOpts& o, long long i, long long j) {
  hk::Prime p(o.p);
  hk::GammaVec prod = hk::GammaVec::lambda(p, i) * hk::GammaVec::lambda(p, j);
  if (o.json) {
    ordered_json out;
    out["p"] = o.p;
    out["i"] = i;
    out["j"] = j;
    ordered_json terms = ordered_json::array();
    for (const auto& [k, c] : prod.coeffs()) {
      ordered_json t;
      t["index"] = k;
      t["coeff"] = hk::rat_to_short_string(c);
      terms.push_back(t);
    }
    out["product"] = terms;
    out["alpha"] = hk::rat_to_short_string(prod.alpha());
    emit(out);
  } else {
    std::cout << "l" << i << " * l" << j << " = " << gamma_str(prod) << "\n";
    std::cout << "alpha = " << hk::rat_to_short_string(prod.alpha()) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- selfcheck

int cmd_selfcheck(bool json) {
  struct Check {
    std::string name;
    bool ok = false;
    std::string detail;
  };
  std::vector<Check> checks;
  auto run = [&](const std::string& name, auto fn) {
    Check c{name};
    try {
      fn();
      c.ok = true;
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    checks.push_back(std::move(c));
  };

  run("lambda products match the representation oracle", [] {
    std::mt19937 rng(12345);
    for (unsigned pv : {2u, 3u, 5u}) {
      hk::Prime p(pv);
      for (int t = 0; t < 10; ++t) {
        long long a = rng() % 20, b = rng() % 20;
        hk::GammaVec u = hk::GammaVec::lambda(p, a), v = hk::GammaVec::lambda(p, b);
        if (!(hk::gamma_mul(u, v) == hk::oracle_mul(u, v)))
          throw std::runtime_error("product mismatch at p=" + std::to_string(pv));
      }
    }
  });

  run("colength elimination routes agree", [] {
    hk::Prime p(3);
    hk::Poly f = hk::poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
    for (long long q : {3LL, 9LL, 27LL}) {
      hk::Poly fb = hk::detail::reduce_mod_box(f, q);
      long long dense = hk::detail::colength_dense(fb, q);
      long long chain = hk::detail::ChainEliminator(3, q).run(fb);
      if (dense != chain)
        throw std::runtime_error("route mismatch at q=" + std::to_string(q));
    }
  });

  run("grid sample round-trips through the sequence transform", [] {
    hk::Prime p(3);
    hk::Poly g = hk::poly_parse("x*y*(x + y)", p, {"x", "y"});
    hk::GridFn phi = hk::sample_phi(g, 3);
    hk::CohSeq seq = hk::L_of(phi);
    if (hk::fn_from_coherent(seq) != phi)
      throw std::runtime_error("round trip changed the sample");
  });

  run("known quartic series reproduced from scratch", [] {
    hk::Prime p(3);
    hk::Poly f = hk::poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
    hk::RuleSystem sys = hk::discover_rules(hk::sample_phi(f, 3), 2);
    hk::RatFunc hks = hk::hks_sum({sys});
    hk::RatFunc want = hk::RatFunc::from_parts(hk::ZPoly{hk::Int(1), hk::Int(5), hk::Int(3)},
                                               hk::ZPoly{hk::Int(1), hk::Int(-3)});
    if (hks != want) throw std::runtime_error("series mismatch: " + hks.to_string());
  });

  run("surface strand counts match dense dimensions", [] {
    hk::Prime p(7);
    hk::Poly h = hk::poly_parse("x^5*y^4", p, {"x", "y"});
    hk::ZDInput in{h, 5};
    if (hk::en_zd(in, 1) != hk::Int(227))
      throw std::runtime_error("e_1 mismatch");
    if (hk::en_zd(in, 1) != hk::direct_en(hk::poly_parse("z^5 - x^5*y^4", p, {"x", "y", "z"}), 1))
      throw std::runtime_error("dense route disagrees");
  });

  bool all = true;
  for (const auto& c : checks) all = all && c.ok;
  if (json) {
    ordered_json j;
    ordered_json arr = ordered_json::array();
    for (const auto& c : checks) {
      ordered_json e;
      e["name"] = c.name;
      e["ok"] = c.ok;
      if (!c.ok) e["detail"] = c.detail;
      arr.push_back(e);
    }
    j["checks"] = arr;
    j["ok"] = all;
    emit(j);
  } else {
    for (const auto& c : checks)
      std::cout << (c.ok ? "ok   " : "FAIL ") << c.name
                << (c.ok ? "" : ": " + c.detail) << "\n";
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert-Kunz functions and series for hypersurfaces over prime fields"};
  app.require_subcommand(1);

  CommonOpts en_o, phi_o, disc_o, ser_o, mult_o, zd_o, gamma_o;
  std::string en_poly, phi_poly, disc_poly, zd_poly;
  std::string disc_out, ser_expr, mult_expr;
  std::vector<std::string> ser_rules, mult_rules;
  long long zd_D = 0, gamma_i = 0, gamma_j = 0;
  bool selfcheck_json = false;

  CLI::App* en = app.add_subcommand("en", "Hilbert-Kunz function values e_n(f)");
  en->add_option("poly", en_poly, "polynomial, e.g. \"y^3-x^4+x^2*y^2\"")->required();
  en_o.n_max = 2;
  add_common(en, en_o, false, true);

  CLI::App* phi = app.add_subcommand("phi", "normalized colength function on the p-adic grid");
  phi->add_option("poly", phi_poly, "polynomial")->required();
  add_common(phi, phi_o, true, false);

  CLI::App* disc = app.add_subcommand("discover", "find the self-similarity rule system of a polynomial");
  disc->add_option("poly", disc_poly, "polynomial")->required();
  disc->add_option("--rules-out", disc_out, "write the rule system to this file");
  add_common(disc, disc_o, true, false);

  CLI::App* ser = app.add_subcommand("series", "closed-form Hilbert-Kunz series of an expression");
  ser->add_option("expr", ser_expr,
                  "declarations then expression, e.g. \"f=y^3-x^4+x^2*y^2; f+f\"");
  ser->add_option("--rules-in", ser_rules, "rule system file, one per factor")
      ->expected(-1);
  add_common(ser, ser_o, true, true);

  CLI::App* mult = app.add_subcommand("mult", "Hilbert-Kunz multiplicity of an expression");
  mult->add_option("expr", mult_expr, "declarations then expression");
  mult->add_option("--rules-in", mult_rules, "rule system file, one per factor")
      ->expected(-1);
  add_common(mult, mult_o, true, false);

  CLI::App* zd = app.add_subcommand("zd", "growth analysis for z^D - h(x,y)");
  zd->add_option("poly", zd_poly, "two-variable term h")->required();
  zd->add_option("--D", zd_D, "z-degree D")->required();
  zd_o.n_max = 4;
  add_common(zd, zd_o, false, true);

  CLI::App* gamma = app.add_subcommand("gamma", "product of two exterior powers, for debugging");
  gamma->add_option("i", gamma_i, "first index")->required();
  gamma->add_option("j", gamma_j, "second index")->required();
  add_common(gamma, gamma_o, false, false);

  CLI::App* self = app.add_subcommand("selfcheck", "run the built-in cross-checks");
  self->add_flag("--json", selfcheck_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (en->parsed()) return cmd_en(en_o, en_poly);
    if (phi->parsed()) return cmd_phi(phi_o, phi_poly);
    if (disc->parsed()) return cmd_discover(disc_o, disc_poly, disc_out);
    if (ser->parsed()) {
      if (ser_expr.empty() == ser_rules.empty())
        throw std::invalid_argument("series needs an expression or --rules-in files, not both");
      return cmd_series(ser_o, ser_expr, ser_rules, false);
    }
    if (mult->parsed()) {
      if (mult_expr.empty() == mult_rules.empty())
        throw std::invalid_argument("mult needs an expression or --rules-in files, not both");
      return cmd_series(mult_o, mult_expr, mult_rules, true);
    }
    if (zd->parsed()) return cmd_zd(zd_o, zd_poly, zd_D);
    if (gamma->parsed()) return cmd_gamma(gamma_o, gamma_i, gamma_j);
    if (self->parsed()) return cmd_selfcheck(selfcheck_json);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    ordered_json j;
    j["error"] = e.what();
    std::cout << j.dump(2) << "\n";
    return 1;
  }
  return 2;
}
