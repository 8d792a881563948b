#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hk/coherent.hpp"

using namespace hk;

namespace {

GridFn random_grid(Prime p, unsigned N, std::mt19937& rng) {
  GridFn g(p, N);
  for (auto& v : g.values)
    v = Rat(static_cast<long long>(rng() % 19) - 9, 1 + rng() % 6);
  g.values.front() = 0;
  return g;
}

CohSeq random_coherent(Prime p, unsigned N, std::mt19937& rng) {
  return L_of(random_grid(p, N, rng));
}

}  // namespace

TEST_CASE("L_of on reference grids") {
  Prime p(3);
  GridFn constant(p, 2);
  for (auto& v : constant.values) v = Rat(5, 7);
  REQUIRE(L_of(constant).is_zero());

  REQUIRE(L_of(identity_grid(p, 3)) == delta_seq(p, 3));

  Poly f = poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
  CohSeq a = L_of(sample_phi(f, 2));
  GammaVec want(p);
  want.add(0, Rat(8, 9));
  want.add(1, Rat(-1, 9));
  REQUIRE(a.u[1] == want);
}

TEST_CASE("validation rejects malformed sequences") {
  Prime p(3);
  CohSeq s(p);
  s.u.push_back(GammaVec::lambda(p, 1));  // support must be below p^0 = 1
  REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);

  CohSeq t(p);
  t.u.push_back(GammaVec::lambda(p, 0));
  t.u.push_back(GammaVec::lambda(p, 1));  // psi(l_1) = -l_0 breaks the chain
  REQUIRE_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("round trip between grids and sequences") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    Prime p(trial % 2 == 0 ? 3u : 5u);
    GridFn g = random_grid(p, 2, rng);
    REQUIRE(fn_from_coherent(L_of(g)) == g);
  }
  REQUIRE(fn_from_coherent(delta_seq(Prime(3), 3)) == identity_grid(Prime(3), 3));
  REQUIRE(fn_from_coherent(L_of(GridFn(Prime(3), 2))) == GridFn(Prime(3), 2));
}

TEST_CASE("fn_from_coherent agrees with the ring-product route") {
  std::mt19937 rng(5);
  Prime p(3);
  CohSeq u = random_coherent(p, 2, rng);
  GridFn g = fn_from_coherent(u);
  for (long long i = 0; i <= 9; ++i)
    REQUIRE(g.values[static_cast<size_t>(i)] ==
            (GammaVec::delta(p, i) * u.u.back()).alpha());
}

TEST_CASE("sequence product") {
  Prime p(7);
  CohSeq lz = L_of(sample_phi(poly_parse("x^3", p, {"x"}), 2));
  CohSeq le = L_of(sample_phi(poly_parse("x^4", p, {"x"}), 2));
  CohSeq prod = seq_mul(lz, le);
  GammaVec want(p);
  want.add(0, Rat(21, 49));
  want.add(1, Rat(-15, 49));
  want.add(2, Rat(10, 49));
  want.add(3, Rat(-3, 49));
  REQUIRE(prod.u[1] == want);

  // Unit sequence: all entries l_0.
  std::mt19937 rng(77);
  CohSeq u = random_coherent(p, 2, rng);
  CohSeq one(p);
  for (int n = 0; n <= 2; ++n) one.u.push_back(GammaVec::lambda(p, 0));
  REQUIRE(seq_mul(u, one) == u);

  // u * Delta = alpha(u_0) Delta.
  CohSeq delta = delta_seq(p, 2);
  REQUIRE(seq_mul(u, delta) == delta * u.u[0].alpha());
  REQUIRE(seq_mul(delta, delta) == delta);
}

TEST_CASE("shift drops a level and widens support") {
  Prime p(3);
  CohSeq d = delta_seq(p, 3);
  CohSeq sd = shift(d);
  for (unsigned n = 0; n <= 2; ++n) {
    Rat scale(1, pow_ll(3, n + 1));
    REQUIRE(sd.u[n] == GammaVec::delta(p, pow_ll(3, n + 1)) * scale);
  }
  REQUIRE_THROWS_AS(sd.validate(), std::invalid_argument);  // slack needed
  sd.validate(1);
  std::mt19937 rng(123);
  REQUIRE(shift(random_coherent(p, 2, rng) * Rat(0)).is_zero());
}

TEST_CASE("reflection on sequences") {
  Prime p(3);
  CohSeq delta = delta_seq(p, 3);
  REQUIRE(reflect_seq(delta) == delta * Rat(-1));

  std::mt19937 rng(2024);
  for (uint32_t pv : {2u, 3u, 5u}) {
    Prime pr(pv);
    CohSeq u = random_coherent(pr, 2, rng);
    REQUIRE(reflect_seq(reflect_seq(u)) == u);
    // Reflection commutes with L through the grid reflection.
    GridFn g = random_grid(pr, 2, rng);
    REQUIRE(L_of(reflect(g)) == reflect_seq(L_of(g)));
  }

  Poly f = poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
  CohSeq a = L_of(sample_phi(f, 1));
  REQUIRE(reflect_seq(a).u[0] == -GammaVec::lambda(p, 0));
}

TEST_CASE("shift and reflection interchange") {
  std::mt19937 rng(404);
  for (uint32_t pv : {3u, 5u}) {
    Prime p(pv);
    CohSeq u = random_coherent(p, 3, rng);
    REQUIRE(shift(reflect_seq(u)) ==
            lambda_scale_general(pv - 1, reflect_seq(shift(u))));
  }
  Prime p2(2);
  CohSeq u2 = random_coherent(p2, 3, rng);
  REQUIRE(shift(reflect_seq(u2)) == lambda_scale_general(1, shift(u2)));
}

TEST_CASE("lambda_scale is the fast remap of the module action") {
  std::mt19937 rng(808);
  for (uint32_t pv : {2u, 3u, 7u}) {
    Prime p(pv);
    CohSeq u = random_coherent(p, 2, rng);
    for (long long k = 0; k < pv; ++k) {
      CohSeq fast = lambda_scale(k, u);
      REQUIRE(fast == lambda_scale_general(k, u));
      // Support lands in [k p^n, (k+1) p^n).
      for (size_t n = 0; n < fast.u.size(); ++n) {
        long long pn = pow_ll(pv, static_cast<unsigned>(n));
        for (const auto& [i, c] : fast.u[n].coeffs()) {
          REQUIRE(i >= k * pn);
          REQUIRE(i < (k + 1) * pn);
        }
      }
    }
    REQUIRE(lambda_scale(0, u) == u);
  }
  CohSeq d = delta_seq(Prime(3), 2);
  REQUIRE_THROWS_AS(lambda_scale(1, shift(d)), std::invalid_argument);
}

TEST_CASE("block decomposition inverts the shift lemma") {
  std::mt19937 rng(909);
  for (uint32_t pv : {2u, 3u, 5u}) {
    Prime p(pv);
    CohSeq u = random_coherent(p, 2, rng);
    for (long long k = 0; k < pv; ++k) {
      auto slots = block_decompose(lambda_scale(k, u));
      for (long long j = 0; j < pv; ++j) {
        if (j == k)
          REQUIRE(slots[static_cast<size_t>(j)] == u);
        else
          REQUIRE(slots[static_cast<size_t>(j)].is_zero());
      }
    }
    // Slots of a shifted L-image match the grid-side window transforms.
    GridFn g = random_grid(p, 3, rng);
    auto slots = block_decompose(shift(L_of(g)));
    for (long long k = 0; k < pv; ++k) {
      GridFn w = transform_T(g, 1, k);
      CohSeq want = k % 2 == 0 ? L_of(w) : L_of(reflect(w));
      REQUIRE(slots[static_cast<size_t>(k)] == want);
    }
  }
}

TEST_CASE("plane-curve shift rules appear in the blocks") {
  Prime p(3);
  Poly f = poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
  CohSeq a = L_of(sample_phi(f, 3));
  CohSeq b2 = reflect_seq(a.truncated(2));
  CohSeq delta = delta_seq(p, 2);
  auto slots = block_decompose(shift(a) * Rat(9));
  REQUIRE(slots[0] == b2 + delta * Rat(9));
  REQUIRE(slots[1] == b2);
  REQUIRE(slots[2].is_zero());

  Poly g = poly_parse("x*y*(x + y)", p, {"x", "y"});
  CohSeq c = L_of(sample_phi(g, 3));
  CohSeq c2 = c.truncated(2);
  auto cslots = block_decompose(shift(c) * Rat(9));
  REQUIRE(cslots[0] == c2 + delta * Rat(6));
  REQUIRE(cslots[1] == c2 - delta * Rat(3));
  REQUIRE(cslots[2].is_zero());
}

TEST_CASE("matching modulo the linear sequence") {
  Prime p(3);
  std::mt19937 rng(606);
  CohSeq b0 = random_coherent(p, 2, rng);
  CohSeq b1 = random_coherent(p, 2, rng);
  CohSeq delta = delta_seq(p, 2);
  std::vector<CohSeq> basis{b0, b1};

  auto m = delta_quotient_match(b0 + delta * Rat(5), basis);
  REQUIRE(m.has_value());
  REQUIRE(m->index == 0);
  REQUIRE(m->delta_coeff == 5);
  REQUIRE(!m->reflected);

  auto r = delta_quotient_match(reflect_seq(b1) - delta * Rat(7, 2), basis);
  REQUIRE(r.has_value());
  REQUIRE(r->index == 1);
  REQUIRE(r->delta_coeff == Rat(-7, 2));
  REQUIRE(r->reflected);

  REQUIRE(!delta_quotient_match(delta, basis).has_value());

  // Two members differing by a Delta multiple make every match ambiguous.
  std::vector<CohSeq> bad{b0, b0 + delta * Rat(1)};
  REQUIRE_THROWS_AS(delta_quotient_match(b0 + delta * Rat(2), bad), std::runtime_error);

  // A member next to its own reflection is a label collision, not ambiguity.
  std::vector<CohSeq> pair{b0, reflect_seq(b0)};
  auto q = delta_quotient_match(b0 + delta * Rat(3), pair);
  REQUIRE(q.has_value());
  REQUIRE(q->index == 0);
  REQUIRE(!q->reflected);
  REQUIRE(q->delta_coeff == 3);
}
