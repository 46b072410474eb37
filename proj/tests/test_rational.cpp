#include "doctest.h"

#include "mql/rational.hpp"

using mql::Rational;

TEST_CASE("rational arithmetic stays reduced") {
  Rational half(1, 2);
  Rational third(1, 3);
  CHECK(half + third == Rational(5, 6));
  CHECK(half * third == Rational(1, 6));
  CHECK(half - half == Rational(0));
  CHECK(half / third == Rational(3, 2));
  CHECK(Rational(2, 4) == half);
  CHECK(Rational(-2, -4) == half);
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK((half < Rational(2, 3)));
  CHECK((Rational(-1, 2) < Rational(1, 3)));
}

TEST_CASE("rational parsing accepts fractions, integers, decimals") {
  CHECK(Rational::parse("1/2") == Rational(1, 2));
  CHECK(Rational::parse("-3/6") == Rational(-1, 2));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("-0.1") == Rational(-1, 10));
  CHECK(Rational::parse(" 2/3 ") == Rational(2, 3));
  CHECK_THROWS_AS(Rational::parse(""), mql::parse_error);
  CHECK_THROWS_AS(Rational::parse("1/0"), mql::parse_error);
  CHECK_THROWS_AS(Rational::parse("x"), mql::parse_error);
  CHECK_THROWS_AS(Rational::parse("1/2/3"), mql::parse_error);
}

TEST_CASE("decimal labels are exact or fall back to fractions") {
  CHECK(Rational(3, 10).decimal_label() == "0.3");
  CHECK(Rational(1, 2).decimal_label() == "0.5");
  CHECK(Rational(7, 8).decimal_label() == "0.875");
  CHECK(Rational(1).decimal_label() == "1");
  CHECK(Rational(-1, 4).decimal_label() == "-0.25");
  CHECK(Rational(1, 3).decimal_label() == "1/3");
  CHECK(Rational(0).decimal_label() == "0");
}

TEST_CASE("floor value handles negatives") {
  CHECK(Rational(7, 2).floor_value() == 3);
  CHECK(Rational(-7, 2).floor_value() == -4);
  CHECK(Rational(6, 3).floor_value() == 2);
  CHECK(Rational(0).floor_value() == 0);
}

TEST_CASE("overflow throws instead of wrapping") {
  Rational big(9'000'000'000'000'000'000LL);
  CHECK_THROWS_AS(big * big, std::overflow_error);
}
