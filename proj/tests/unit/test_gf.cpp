#include <doctest.h>

#include <stdexcept>

#include <random>

#include "ncorr/gf.hpp"
#include "ncorr/rng.hpp"
#include "oracles.hpp"

using ncorr::gf::Element;
using ncorr::gf::Field;

TEST_SUITE_BEGIN("gf");

TEST_CASE("default reduction polynomials are the smallest irreducibles") {
  CHECK(Field::default_reduction_poly(1) == 0b10);
  CHECK(Field::default_reduction_poly(2) == 0b111);
  CHECK(Field::default_reduction_poly(3) == 0b1011);
  CHECK(Field::default_reduction_poly(4) == 0b10011);  // x^4 + x + 1
  for (unsigned p = 1; p <= 8; ++p) {
    const unsigned poly = Field::default_reduction_poly(p);
    CHECK(Field::is_irreducible(poly, p));
    for (unsigned smaller = (1u << p); smaller < poly; ++smaller) {
      CHECK_FALSE(Field::is_irreducible(smaller, p));
    }
  }
}

TEST_CASE("irreducibility screening") {
  CHECK(Field::is_irreducible(0b111, 2));
  CHECK_FALSE(Field::is_irreducible(0b110, 2));    // x^2 + x = x(x+1)
  CHECK_FALSE(Field::is_irreducible(0b10101, 4));  // (x^2+x+1)^2
  CHECK_FALSE(Field::is_irreducible(0b111, 4));    // wrong degree
  CHECK_THROWS_AS(Field(4, 0b10101), std::invalid_argument);
}

TEST_CASE("addition is xor with identity and self-inverse") {
  Field f16(4);
  CHECK(f16.add(5, 5) == 0);
  for (unsigned a = 0; a < 16; ++a) {
    CHECK(f16.add(static_cast<std::uint8_t>(a), 0) == a);
    CHECK(f16.add(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(a)) == 0);
  }
  Field f4(2);
  CHECK(f4.add(2, 3) == 1);
}

TEST_CASE("multiplication examples") {
  Field f16(4);
  CHECK(f16.mul(2, 8) == 3);  // x * x^3 = x^4 = x + 1
  for (unsigned a = 0; a < 16; ++a) {
    CHECK(f16.mul(static_cast<std::uint8_t>(a), 1) == a);
    CHECK(f16.mul(static_cast<std::uint8_t>(a), 0) == 0);
  }
  Field f4(2);
  CHECK(f4.mul(2, 3) == 1);  // x(x+1) = x^2 + x = 1 mod x^2+x+1
}

TEST_CASE("inverses") {
  Field f4(2);
  CHECK(f4.inv(1) == 1);
  CHECK(f4.inv(2) == 3);
  for (unsigned p = 1; p <= 8; ++p) {
    Field f(p);
    for (unsigned a = 1; a < f.size(); ++a) {
      CHECK(f.mul(static_cast<std::uint8_t>(a), f.inv(static_cast<std::uint8_t>(a))) == 1);
    }
    CHECK_THROWS_AS(f.inv(0), std::domain_error);
  }
}

TEST_CASE("multiplication agrees with the schoolbook polynomial oracle") {
  for (unsigned p = 1; p <= 4; ++p) {
    Field f(p);
    for (unsigned a = 0; a < f.size(); ++a) {
      for (unsigned b = 0; b < f.size(); ++b) {
        CHECK(f.mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)) ==
              oracles::poly_mul_mod(a, b, f.reduction_poly(), p));
      }
    }
  }
}

TEST_CASE("field axioms, exhaustive for small fields") {
  for (unsigned p = 1; p <= 4; ++p) {
    Field f(p);
    const unsigned q = f.size();
    for (unsigned a = 0; a < q; ++a) {
      for (unsigned b = 0; b < q; ++b) {
        const auto ua = static_cast<std::uint8_t>(a);
        const auto ub = static_cast<std::uint8_t>(b);
        CHECK(f.add(ua, ub) == f.add(ub, ua));
        CHECK(f.mul(ua, ub) == f.mul(ub, ua));
        for (unsigned c = 0; c < q; ++c) {
          const auto uc = static_cast<std::uint8_t>(c);
          CHECK(f.add(f.add(ua, ub), uc) == f.add(ua, f.add(ub, uc)));
          CHECK(f.mul(f.mul(ua, ub), uc) == f.mul(ua, f.mul(ub, uc)));
          CHECK(f.mul(ua, f.add(ub, uc)) == f.add(f.mul(ua, ub), f.mul(ua, uc)));
        }
      }
    }
  }
}

TEST_CASE("field axioms, randomized for large fields") {
  for (unsigned p = 5; p <= 8; ++p) {
    Field f(p);
    std::mt19937_64 g = ncorr::rng::make_stream(42, p);
    for (int t = 0; t < 100000; ++t) {
      const auto a = static_cast<std::uint8_t>(ncorr::rng::uniform_below(g, f.size()));
      const auto b = static_cast<std::uint8_t>(ncorr::rng::uniform_below(g, f.size()));
      const auto c = static_cast<std::uint8_t>(ncorr::rng::uniform_below(g, f.size()));
      REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
      REQUIRE(f.mul(a, b) == f.mul(b, a));
      REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
    }
  }
}

TEST_CASE("log and antilog tables are mutually inverse") {
  for (unsigned p = 4; p <= 8; ++p) {
    Field f(p);
    REQUIRE(f.has_tables());
    const auto& log = f.log_table();
    const auto& exp = f.antilog_table();
    for (unsigned a = 1; a < f.size(); ++a) {
      CHECK(exp[log[a]] == a);
    }
    for (unsigned k = 0; k < f.size() - 1; ++k) {
      CHECK(log[exp[k]] == k);
    }
  }
}

TEST_CASE("small fields skip the tables but agree with the tabled path") {
  Field f8(3);
  CHECK_FALSE(f8.has_tables());
}

TEST_CASE("checked elements reject mixed fields and bad values") {
  Field f4(2), f16(4);
  CHECK_THROWS_AS(Element(f4, 7), std::invalid_argument);
  Element a(f4, 2), b(f16, 2);
  CHECK_THROWS_AS(a + b, std::invalid_argument);
  CHECK_THROWS_AS(a * b, std::invalid_argument);
  Element c(f4, 3);
  CHECK((a * c).value() == 1);
  CHECK((a + c).value() == 1);
  CHECK(a.inverse().value() == 3);
  CHECK_THROWS_AS(f16.mul(200, 1), std::invalid_argument);
}

TEST_SUITE_END();
