#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace pacurves;

TEST_CASE("functions and derivatives") {
  const auto e = Expression::parse("sech(s)^2 + arctan(sinh(s)) - 1/sqrt(1 - s^2)");
  const double s = 0.3;
  const Dual d = e.eval(s);
  const auto ref = [](double x) { return std::pow(testing::sech(x), 2) + std::atan(std::sinh(x)) - 1 / std::sqrt(1 - x * x); };
  CHECK(d.value == doctest::Approx(ref(s)).epsilon(1e-14));
  CHECK(d.derivative == doctest::Approx(testing::brute_derivative(ref, s)).epsilon(1e-9));
}

TEST_CASE("precedence and constants") {
  CHECK(Expression::parse("2^3^2")(0) == doctest::Approx(512));
  CHECK(Expression::parse("-s^2")(3) == doctest::Approx(-9));
  CHECK(Expression::parse("pi - arcsin(s)")(0) == doctest::Approx(std::numbers::pi));
  CHECK(Expression::parse("e")(0) == doctest::Approx(std::exp(1.0)));
  CHECK(Expression::parse("1/2*s", "s")(4) == doctest::Approx(2));
}

TEST_CASE("definitions") {
  const Expression::Definitions defs{{"rad", "sqrt(1 + s^2)"}, {"f", "1/rad"}};
  CHECK(Expression::parse("f*rad", "s", defs)(1.7) == doctest::Approx(1.0));
  const Expression::Definitions cyclic{{"a", "b + 1"}, {"b", "a"}};
  CHECK_THROWS_AS(Expression::parse("a", "s", cyclic), Error);
}

TEST_CASE("other variable") { CHECK(Expression::parse("exp(t)", "t")(1.0) == doctest::Approx(std::exp(1.0))); }

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(Expression::parse("sin("), Error);
  CHECK_THROWS_AS(Expression::parse("foo(s)"), Error);
  CHECK_THROWS_AS(Expression::parse("s s"), Error);
  CHECK_THROWS_AS(Expression::parse("x"), Error);
}

TEST_CASE("sampling attaches the exact derivative") {
  const Grid g = Grid::uniform(0, 1, 0.01);
  const ScalarSeries x = sample(Expression::parse("sin(3*s)"), g);
  REQUIRE(x.has_exact_derivative());
  CHECK((*x.exact_derivative)[50] == doctest::Approx(3 * std::cos(1.5)).epsilon(1e-14));
}
