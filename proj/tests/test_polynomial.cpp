#include "doctest.h"

#include <array>

#include "plab/polynomial.hpp"

using namespace plab;

TEST_CASE("polynomial parsing and evaluation") {
  auto names = real_coordinate_names(2);
  auto p = parse_real_polynomial("x1^2 + 2*y1*x2 - (y2 - 1)^2 / 2", names);
  std::array<double, 4> x{1.5, -2.0, 0.25, 3.0};
  const double expected = 1.5 * 1.5 + 2 * -2.0 * 0.25 - (3.0 - 1) * (3.0 - 1) / 2;
  CHECK(p(std::span<const double>(x)) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(p.degree() == 2);

  auto dx1 = p.derivative(0);
  CHECK(dx1(std::span<const double>(x)) == doctest::Approx(3.0));
}

TEST_CASE("complex polynomial uses i as imaginary unit") {
  auto q = parse_complex_polynomial("z1^2 + i*z2", {"z1", "z2"});
  std::array<Complex, 2> z{Complex(1, 1), Complex(2, 0)};
  Complex v = q(std::span<const Complex>(z));
  CHECK(v.real() == doctest::Approx(0.0));
  CHECK(v.imag() == doctest::Approx(4.0));
}

TEST_CASE("parse errors are reported") {
  auto names = real_coordinate_names(1);
  CHECK_THROWS_AS(parse_real_polynomial("x1 + q", names), ParseError);
  CHECK_THROWS_AS(parse_real_polynomial("x1 / y1", names), ParseError);
  CHECK_THROWS_AS(parse_real_polynomial("(x1 + 1", names), ParseError);
  CHECK_THROWS_AS(parse_real_polynomial("x1^", names), ParseError);
}

TEST_CASE("cancellation removes terms") {
  auto names = real_coordinate_names(1);
  auto p = parse_real_polynomial("(x1 + y1)^2 - x1^2 - 2*x1*y1 - y1^2", names);
  CHECK(p.is_zero());
}
