#include <catch2/catch_amalgamated.hpp>

#include "hk/fp.hpp"
#include "hk/poly.hpp"
#include "hk/rational.hpp"

using namespace hk;

TEST_CASE("Prime validates range and primality") {
  REQUIRE(Prime(2).value() == 2);
  REQUIRE(Prime(97).value() == 97);
  REQUIRE_THROWS_AS(Prime(1), std::invalid_argument);
  REQUIRE_THROWS_AS(Prime(4), std::invalid_argument);
  REQUIRE_THROWS_AS(Prime(91), std::invalid_argument);  // 7*13
  REQUIRE_THROWS_AS(Prime(101), std::invalid_argument);
}

TEST_CASE("modular helpers") {
  REQUIRE(pow_mod(3, 0, 7) == 1);
  REQUIRE(pow_mod(3, 6, 7) == 1);
  REQUIRE(inv_mod(3, 7) == 5);
  for (uint32_t a = 1; a < 13; ++a) REQUIRE(mul_mod(a, inv_mod(a, 13), 13) == 1);
  REQUIRE_THROWS_AS(inv_mod(0, 7), std::domain_error);
  auto pas = binomials_mod(4, 3);
  REQUIRE(pas[4] == std::vector<uint32_t>{1, 1, 0, 1, 1});
}

TEST_CASE("parser accepts standard forms") {
  Prime p(3);
  Poly f = poly_parse("y^3 - x^4 + x^2*y^2", p, {"x", "y"});
  REQUIRE(f.term_count() == 3);
  // Canonical order: grlex descending, coefficients reduced to [1, p).
  REQUIRE(f.to_string() == "2*x^4 + x^2*y^2 + y^3");
  REQUIRE(poly_parse("x y", p, {"x", "y"}).to_string() == "x*y");
  REQUIRE(poly_parse("2x", p, {"x"}).to_string() == "2*x");
  REQUIRE(poly_parse("(x+y)^2", p, {"x", "y"}).to_string() == "x^2 + 2*x*y + y^2");
  REQUIRE(poly_parse("-x + 4", p, {"x"}).to_string() == "2*x + 1");
  REQUIRE(poly_parse("x - x", p, {"x"}).is_zero());
  REQUIRE(poly_parse("0", p, {"x"}).to_string() == "0");
  REQUIRE(poly_parse("3*x^2 + 1", p, {"x"}).to_string() == "1");
}

TEST_CASE("parser rejects malformed input with positions") {
  Prime p(7);
  REQUIRE_THROWS_WITH(poly_parse("x + ", p, {"x"}),
                      Catch::Matchers::ContainsSubstring("position"));
  REQUIRE_THROWS_AS(poly_parse("x + z", p, {"x", "y"}), std::invalid_argument);
  REQUIRE_THROWS_AS(poly_parse("x^", p, {"x"}), std::invalid_argument);
  REQUIRE_THROWS_AS(poly_parse("(x", p, {"x"}), std::invalid_argument);
  REQUIRE_THROWS_AS(poly_parse("", p, {"x"}), std::invalid_argument);
  REQUIRE_THROWS_AS(poly_parse("x^999999999999", p, {"x"}), std::invalid_argument);
}

TEST_CASE("ring operations") {
  Prime p(5);
  Poly f = poly_parse("x + y", p, {"x", "y"});
  Poly g = poly_parse("x - y", p, {"x", "y"});
  REQUIRE((f * g).to_string() == "x^2 + 4*y^2");
  REQUIRE((f + g).to_string() == "2*x");
  REQUIRE((f - f).is_zero());
  REQUIRE(f.pow(0).to_string() == "1");
  REQUIRE(f.pow(5).to_string() == "x^5 + y^5");  // Frobenius
  REQUIRE(f.pow(6) == f.pow(5) * f);
  REQUIRE(f.frobenius().to_string() == "x^5 + y^5");
}

TEST_CASE("pow matches repeated multiplication") {
  Prime p(7);
  Poly f = poly_parse("x^3 + y^4 + 2*x*y", p, {"x", "y"});
  Poly acc = Poly::constant(p, {"x", "y"}, 1);
  for (unsigned m = 0; m <= 20; ++m) {
    REQUIRE(f.pow(m) == acc);
    acc = acc * f;
  }
}

TEST_CASE("degree and homogeneity") {
  Prime p(7);
  Poly f = poly_parse("x^6*y^6*(x^2 - y^2)", p, {"x", "y"});
  REQUIRE(f.total_degree() == 14);
  REQUIRE(f.is_homogeneous());
  REQUIRE(!poly_parse("x^3 + y^4", p, {"x", "y"}).is_homogeneous());
  REQUIRE(poly_parse("0", p, {"x"}).total_degree() == -1);
  REQUIRE(f.degree_in(0) == 8);
  REQUIRE(f.degree_in(1) == 8);
}

TEST_CASE("variable embedding keeps terms disjoint") {
  Prime p(3);
  Poly f = poly_parse("x^2 + y", p, {"x", "y"});
  Poly g = f.embedded({"x1", "y1", "x2", "y2"}, 2);
  REQUIRE(g.to_string() == "x2^2 + y2");
  Poly h = f.renamed({"u", "v"});
  REQUIRE(h.to_string() == "u^2 + v");
  REQUIRE_THROWS_AS(f.renamed({"u"}), std::invalid_argument);
}

TEST_CASE("mismatched rings are rejected") {
  Poly f = poly_parse("x", Prime(3), {"x"});
  Poly g = poly_parse("x", Prime(5), {"x"});
  REQUIRE_THROWS_AS(f + g, std::invalid_argument);
  Poly h = poly_parse("y", Prime(3), {"y"});
  REQUIRE_THROWS_AS(f * h, std::invalid_argument);
}

TEST_CASE("rational formatting round-trips") {
  REQUIRE(rat_to_string(Rat(7, 3)) == "7/3");
  REQUIRE(rat_to_string(Rat(-6, 4)) == "-3/2");
  REQUIRE(rat_to_string(Rat(5)) == "5/1");
  REQUIRE(rat_to_short_string(Rat(5)) == "5");
  REQUIRE(rat_from_string("7/3") == Rat(7, 3));
  REQUIRE(rat_from_string("-12") == Rat(-12));
  REQUIRE_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
  REQUIRE_THROWS_AS(rat_from_string("x"), std::invalid_argument);
  REQUIRE(int_pow(Int(7), 4) == 2401);
}
