#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hk/gamma.hpp"
#include "hk/gamma_oracle.hpp"

using namespace hk;

namespace {

GammaVec L(Prime p, std::initializer_list<std::pair<long long, long long>> terms) {
  GammaVec v(p);
  for (auto [i, c] : terms) v.add(i, Rat(c));
  return v;
}

GammaVec random_vec(Prime p, std::mt19937& rng, long long max_idx, int nterms) {
  GammaVec v(p);
  for (int t = 0; t < nterms; ++t)
    v.add(static_cast<long long>(rng() % (max_idx + 1)),
          Rat(static_cast<long long>(rng() % 7) - 3));
  return v;
}

}  // namespace

TEST_CASE("basis products at small index") {
  Prime p3(3);
  auto l = [&](long long i) { return GammaVec::lambda(p3, i); };
  REQUIRE(l(1) * l(1) == L(p3, {{0, 1}, {1, 1}, {2, 1}}));
  REQUIRE(l(2) * l(2) == L(p3, {{0, 1}}));
  REQUIRE(l(3) * l(3) == L(p3, {{0, 1}, {5, 1}, {6, 1}}));
  REQUIRE(l(0) * l(7) == l(7));

  Prime p7(7);
  REQUIRE(GammaVec::lambda(p7, 1) * GammaVec::lambda(p7, 2) ==
          L(p7, {{1, 1}, {2, 1}, {3, 1}}));
}

TEST_CASE("delta products through the oracle") {
  Prime p3(3);
  GammaVec d2 = GammaVec::delta(p3, 2), d3 = GammaVec::delta(p3, 3);
  REQUIRE(oracle_mul(d2, d3) == GammaVec::delta(p3, 3) * Rat(2));
  // d_1 is the unit's little sibling: d_1 d_n = d_n.
  REQUIRE(oracle_mul(GammaVec::delta(p3, 1), d3) == d3);
}

TEST_CASE("recursive product agrees with the Jordan oracle") {
  for (uint32_t pv : {2u, 3u, 5u, 7u}) {
    Prime p(pv);
    for (long long a = 0; a <= 20; ++a)
      for (long long b = a; b <= 20; ++b) {
        GammaVec got = GammaVec::lambda(p, a) * GammaVec::lambda(p, b);
        GammaVec want = oracle_mul(GammaVec::lambda(p, a), GammaVec::lambda(p, b));
        INFO("p=" << pv << " a=" << a << " b=" << b);
        REQUIRE(got == want);
      }
  }
}

TEST_CASE("product is commutative and associative") {
  std::mt19937 rng(7031);
  for (uint32_t pv : {2u, 3u, 5u}) {
    Prime p(pv);
    for (int trial = 0; trial < 10; ++trial) {
      GammaVec u = random_vec(p, rng, 12, 3);
      GammaVec v = random_vec(p, rng, 12, 3);
      GammaVec w = random_vec(p, rng, 12, 2);
      REQUIRE(u * v == v * u);
      REQUIRE((u * v) * w == u * (v * w));
      REQUIRE(u * (v + w) == u * v + u * w);
    }
  }
}

TEST_CASE("alpha picks the unit coefficient of a product") {
  Prime p(5);
  for (long long i = 0; i <= 15; ++i)
    for (long long j = 0; j <= 15; ++j) {
      Rat a = (GammaVec::lambda(p, i) * GammaVec::lambda(p, j)).alpha();
      REQUIRE(a == (i == j ? Rat(1) : Rat(0)));
    }
}

TEST_CASE("theta is a ring map and psi undoes it") {
  std::mt19937 rng(9917);
  for (uint32_t pv : {2u, 3u, 7u}) {
    Prime p(pv);
    for (int trial = 0; trial < 8; ++trial) {
      GammaVec u = random_vec(p, rng, 10, 3);
      GammaVec v = random_vec(p, rng, 10, 3);
      REQUIRE((u * v).theta() == u.theta() * v.theta());
      REQUIRE(u.theta().psi() == u);
    }
  }
}

TEST_CASE("psi on the alternating sums") {
  // psi(d_{pr+k}) = (p-k) d_r + k d_{r+1} for 0 <= k <= p.
  for (uint32_t pv : {3u, 7u}) {
    Prime p(pv);
    for (long long r = 0; r <= 3; ++r)
      for (long long k = 0; k <= pv; ++k) {
        GammaVec lhs = GammaVec::delta(p, pv * r + k).psi();
        GammaVec rhs = GammaVec::delta(p, r) * Rat(static_cast<long long>(pv) - k) +
                       GammaVec::delta(p, r + 1) * Rat(k);
        INFO("p=" << pv << " r=" << r << " k=" << k);
        REQUIRE(lhs == rhs);
      }
  }
}

TEST_CASE("alpha moves through psi against a high alternating sum") {
  std::mt19937 rng(551);
  Prime p(3);
  for (int trial = 0; trial < 12; ++trial) {
    GammaVec u = random_vec(p, rng, 20, 4);
    for (long long i = 1; i <= 6; ++i) {
      GammaVec big = GammaVec::delta(p, 3 * i) * u;
      GammaVec small = GammaVec::delta(p, i) * u.psi();
      REQUIRE(big.alpha() == small.alpha());
    }
  }
}

TEST_CASE("index shift identities at a power of p") {
  Prime p(3);
  auto l = [&](long long i) { return GammaVec::lambda(p, i); };
  for (long long q : {3ll, 9ll}) {
    for (long long j = 1; j <= 4; ++j) {
      if (j % 3 == 0 || (j + 1) % 3 == 0) continue;
      GammaVec lhs = l(q) * l(q * j);
      GammaVec rhs = l(q * (j - 1)) + l(q * (j + 1) - 1) + l(q * (j + 1));
      INFO("q=" << q << " j=" << j);
      REQUIRE(lhs == rhs);
    }
    // d_i d_{qj} = i d_{qj} for i <= q.
    for (long long i = 1; i <= q; ++i)
      for (long long j = 1; j <= 3; ++j)
        REQUIRE(GammaVec::delta(p, i) * GammaVec::delta(p, q * j) ==
                GammaVec::delta(p, q * j) * Rat(i));
  }
}

TEST_CASE("brackets from colength tables") {
  Prime p7(7);
  Poly f = poly_parse("x^3 + y^4", p7, {"x", "y"});
  GammaVec b1 = bracket(colength_table(f, 7, 7), p7);
  REQUIRE(b1 == L(p7, {{0, 21}, {1, -15}, {2, 10}, {3, -3}}));
  REQUIRE(b1.alpha() == 21);

  Prime p3(3);
  Poly f3 = poly_parse("y^3 - x^4 + x^2*y^2", p3, {"x", "y"});
  GammaVec a1 = bracket(colength_table(f3, 3, 3), p3);
  REQUIRE(a1 == L(p3, {{0, 8}, {1, -1}}));

  // alpha(d_i * bracket) recovers the table entries.
  ColengthTable t = colength_table(f3, 3, 3);
  for (long long i = 0; i <= 3; ++i)
    REQUIRE((GammaVec::delta(p3, i) * a1).alpha() == Rat(t.c[static_cast<size_t>(i)]));
}

TEST_CASE("bracket of a disjoint sum is the product of brackets") {
  Prime p(3);
  Poly f = poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
  Poly g = poly_parse("x*y*(x + y)", p, {"x", "y"});
  std::vector<std::string> v4{"x1", "y1", "x2", "y2"};
  Poly sum = f.embedded(v4, 0) + g.embedded(v4, 2);
  GammaVec lhs = bracket(colength_table(sum, 3, 3), p);
  GammaVec rhs = bracket(colength_table(f, 3, 3), p) * bracket(colength_table(g, 3, 3), p);
  REQUIRE(lhs == rhs);
  REQUIRE(lhs.alpha() == Rat(direct_en(sum, 1)));
}

TEST_CASE("vector utility surface") {
  Prime p(3);
  GammaVec v = L(p, {{0, 2}, {3, -1}});
  v.add(5, Rat(1, 2));
  REQUIRE(v.to_string() == "2*l0 - l3 + 1/2*l5");
  REQUIRE(!v.is_integral());
  REQUIRE(v.max_index() == 5);
  REQUIRE(GammaVec(p).to_string() == "0");
  REQUIRE(GammaVec(p).max_index() == -1);
  REQUIRE_THROWS_AS(oracle_mul(v, v), std::invalid_argument);
  GammaVec big = GammaVec::lambda(p, 61);
  REQUIRE_THROWS_AS(oracle_mul(big, big), std::invalid_argument);
  REQUIRE_THROWS_AS(GammaVec::lambda(p, -1), std::invalid_argument);
  REQUIRE_THROWS_AS(GammaVec::lambda(p, kGammaIndexBound + 1), std::invalid_argument);
  REQUIRE_THROWS_AS(v * GammaVec(Prime(5)), std::invalid_argument);
  // l_n = (-1)^n (d_{n+1} - d_n).
  for (long long n = 0; n <= 9; ++n) {
    GammaVec diff = (GammaVec::delta(p, n + 1) - GammaVec::delta(p, n)) *
                    (n % 2 == 0 ? Rat(1) : Rat(-1));
    REQUIRE(diff == GammaVec::lambda(p, n));
  }
}
