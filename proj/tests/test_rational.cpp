#include "doctest.h"
#include "lll/errors.hpp"
#include "lll/rational.hpp"
#include "lll/rng.hpp"

using namespace lll;

TEST_CASE("power-of-two reciprocals are exact") {
  CHECK(pow2_inv(0) == Rat(1));
  CHECK(pow2_inv(1) == Rat(1, 2));
  CHECK(pow2_inv(3) == Rat(1, 8));
  CHECK(pow2_inv(7) == Rat(1, 128));
  // Far beyond double precision.
  Rat tiny = pow2_inv(200);
  Rat two(2);
  Rat back = tiny;
  for (int i = 0; i < 200; ++i) back *= two;
  CHECK(back == Rat(1));
}

TEST_CASE("parsing rationals") {
  CHECK(rat_parse("3/4") == Rat(3, 4));
  CHECK(rat_parse("6/8") == Rat(3, 4));  // canonicalized
  CHECK(rat_parse("-1/2") == Rat(-1, 2));
  CHECK(rat_parse("0/5") == Rat(0));
  CHECK(rat_parse("7") == Rat(7));
  CHECK(rat_parse("123456789012345678901234567890/3") ==
        Rat(Int("41152263004115226300411522630")));

  CHECK_THROWS_AS(rat_parse("1/0"), Error);
  CHECK_THROWS_AS(rat_parse("abc"), Error);
  CHECK_THROWS_AS(rat_parse("1.5"), Error);
  CHECK_THROWS_AS(rat_parse(""), Error);
  CHECK_THROWS_AS(rat_parse("1/"), Error);
  CHECK_THROWS_AS(rat_parse("/2"), Error);
  CHECK_THROWS_AS(rat_parse("1/-2"), Error);  // sign only on the numerator

  try {
    rat_parse("nope");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("printing always uses num/den and round-trips") {
  CHECK(rat_str(Rat(3)) == "3/1");
  CHECK(rat_str(Rat(0)) == "0/1");
  CHECK(rat_str(rat_parse("-5/10")) == "-1/2");
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    Rat q(rng.range(-1000, 1000), 1 + static_cast<long>(rng.below(999)));
    q.canonicalize();
    CHECK(rat_parse(rat_str(q)) == q);
  }
}

TEST_CASE("exact square roots") {
  REQUIRE(rat_sqrt_exact(Rat(9, 4)).has_value());
  CHECK(*rat_sqrt_exact(Rat(9, 4)) == Rat(3, 2));
  CHECK(*rat_sqrt_exact(Rat(0)) == Rat(0));
  CHECK(*rat_sqrt_exact(Rat(49)) == Rat(7));
  CHECK(*rat_sqrt_exact(Rat(1, 1048576)) == Rat(1, 1024));
  CHECK_FALSE(rat_sqrt_exact(Rat(2)).has_value());
  CHECK_FALSE(rat_sqrt_exact(Rat(9, 5)).has_value());
  CHECK_FALSE(rat_sqrt_exact(Rat(-4)).has_value());

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Rat q(1 + static_cast<long>(rng.below(500)),
          1 + static_cast<long>(rng.below(500)));
    q.canonicalize();
    Rat sq = q * q;
    auto r = rat_sqrt_exact(sq);
    REQUIRE(r.has_value());
    CHECK(*r == q);
  }
}

TEST_CASE("dyadic ceiling rounds up by less than one unit") {
  // Identity on values that already fit the grid.
  CHECK(ceil_dyadic(Rat(3, 8), 32) == Rat(3, 8));
  CHECK(ceil_dyadic(Rat(0), 32) == Rat(0));
  CHECK(ceil_dyadic(Rat(2), 32) == Rat(2));
  // ceil(1/3 * 4) / 4 = 2/4.
  CHECK(ceil_dyadic(Rat(1, 3), 2) == Rat(1, 2));

  Rng rng(11);
  Rat unit = pow2_inv(32);
  for (int i = 0; i < 300; ++i) {
    Rat q(static_cast<long>(rng.below(10000)),
          1 + static_cast<long>(rng.below(9999)));
    q.canonicalize();
    Rat r = ceil_dyadic(q, 32);
    CHECK(r >= q);
    CHECK(r - q < unit);
    // The result itself lies on the dyadic grid.
    CHECK(ceil_dyadic(r, 32) == r);
  }
}
