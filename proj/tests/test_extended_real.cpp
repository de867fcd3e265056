#include <oscurve/extended_real.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using oscurve::ExtendedReal;

TEST_CASE("construction normalizes the mantissa") {
  for (double v : {1.0, 3.5, -0.125, 1e-300, -7e300, 0.75}) {
    const ExtendedReal x(v);
    CHECK(std::abs(x.mantissa()) >= 1.0);
    CHECK(std::abs(x.mantissa()) < 2.0);
    CHECK(x.to_double() == v);
  }
  const ExtendedReal z(0.0);
  CHECK(z.is_zero());
  CHECK(z.sign() == 0);
  CHECK(std::isinf(z.log_abs()));
}

TEST_CASE("exp covers exponents far outside the double range") {
  const ExtendedReal tiny = ExtendedReal::exp(-1e12);
  CHECK_FALSE(tiny.is_zero());
  CHECK(tiny.log_abs() == doctest::Approx(-1e12).epsilon(1e-15));
  CHECK(tiny.to_double() == 0.0);

  const ExtendedReal big = ExtendedReal::exp(5e5);
  CHECK(big.log_abs() == doctest::Approx(5e5).epsilon(1e-15));
  CHECK(std::isinf(big.to_double()));

  CHECK(ExtendedReal::exp(1.0).to_double() == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(ExtendedReal::exp(-700.5).to_double() ==
        doctest::Approx(std::exp(-700.5)).epsilon(1e-13));
}

TEST_CASE("arithmetic matches doubles inside the double range") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-30.0, 30.0);
  std::uniform_int_distribution<int> sgn(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double a = (sgn(rng) ? 1 : -1) * std::exp(mag(rng));
    const double b = (sgn(rng) ? 1 : -1) * std::exp(mag(rng));
    const ExtendedReal A(a), B(b);
    CHECK((A * B).to_double() == doctest::Approx(a * b).epsilon(1e-15));
    CHECK((A / B).to_double() == doctest::Approx(a / b).epsilon(1e-15));
    const double s = a + b;
    CHECK(std::abs((A + B).to_double() - s) <= 4e-16 * (std::abs(a) + std::abs(b)));
    CHECK(std::abs((A - B).to_double() - (a - b)) <= 4e-16 * (std::abs(a) + std::abs(b)));
    CHECK((A < B) == (a < b));
    CHECK((A == B) == (a == b));
  }
}

TEST_CASE("addition across wildly different scales keeps the larger term") {
  const ExtendedReal big = ExtendedReal::exp(-1000.0);
  const ExtendedReal small = ExtendedReal::exp(-5000.0);
  CHECK((big + small) == big);
  CHECK((small + big) == big);
  CHECK((big - big).is_zero());
}

TEST_CASE("log helpers and from_log round trip") {
  for (double l : {-123456.5, -2.0, 0.0, 3.25, 80000.0}) {
    const ExtendedReal x = ExtendedReal::from_log(l, -1);
    CHECK(x.sign() == -1);
    CHECK(x.log_abs() == doctest::Approx(l).epsilon(1e-14));
    CHECK(x.log2_abs() == doctest::Approx(l / std::log(2.0)).epsilon(1e-14));
    CHECK(x.log10_abs() == doctest::Approx(l / std::log(10.0)).epsilon(1e-14));
  }
  CHECK(ExtendedReal::from_log2(10.0).to_double() == doctest::Approx(1024.0));
  CHECK(ExtendedReal::from_log(0.0, 0).is_zero());
  CHECK(ExtendedReal::from_parts(3.0, 4) == ExtendedReal(48.0));
}

TEST_CASE("pow_abs and ordering in extended range") {
  const ExtendedReal x = ExtendedReal::exp(-3000.0);
  CHECK(x.pow_abs(1.0 / 6.0).log_abs() == doctest::Approx(-500.0).epsilon(1e-14));
  CHECK((-x).pow_abs(2.0).log_abs() == doctest::Approx(-6000.0).epsilon(1e-14));
  CHECK(ExtendedReal(0.0).pow_abs(0.5).is_zero());
  CHECK(ExtendedReal::exp(-3001.0) < x);
  CHECK(-x < ExtendedReal(0.0));
  CHECK((-x).abs() == x);
}

TEST_CASE("stream output is readable") {
  std::ostringstream os;
  os << ExtendedReal(2.0);
  CHECK_FALSE(os.str().empty());
}

TEST_CASE("round trip through (log magnitude, sign)") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<std::int64_t> small_scale(-2, 2), big_scale(-4'000'000, 4'000'000);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < 5000; ++i) {
    const ExtendedReal x = ExtendedReal::from_parts((i % 2 ? -1.0 : 1.0) * mant(rng), small_scale(rng));
    const ExtendedReal y = ExtendedReal::from_log(x.log_abs(), x.sign());
    CHECK(std::abs((y / x).to_double() - 1.0) <= 2.0 * eps);
  }
  for (int i = 0; i < 5000; ++i) {
    const ExtendedReal x = ExtendedReal::from_parts(mant(rng), big_scale(rng));
    const ExtendedReal y = ExtendedReal::from_log(x.log_abs(), 1);
    // log x carries an absolute error of about eps * |log x|, which exp
    // turns into the same relative error.
    CHECK(std::abs((y / x).to_double() - 1.0) <= 2.0 * eps * std::max(1.0, std::abs(x.log_abs())));
  }
}
