#include <oscurve/quadrature.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace oscurve;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2m - 1 exactly") {
  for (int m : {1, 4, 10, 20}) {
    const QuadratureRule rule = gauss_legendre(m);
    REQUIRE(rule.size() == static_cast<std::size_t>(m));
    for (int d = 0; d <= 2 * m - 1; ++d) {
      const double got = rule.integrate(0.0, 1.0, [d](double t) { return std::pow(t, d); });
      CHECK(got == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Jacobi handles the endpoint weights") {
  // integral_0^1 (1 - t)^a t^b dt = B(a + 1, b + 1)
  const auto beta_fn = [](double a, double b) {
    return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 2);
  };
  for (double a : {-0.5, 0.0, 1.0 / 6.0, 1.0 / 3.0}) {
    for (double b : {-0.5, 0.0, 1.0 / 6.0, 2.0}) {
      const QuadratureRule rule = gauss_jacobi(16, a, b);
      const double got = rule.integrate(0.0, 1.0, [](double) { return 1.0; });
      CHECK(got == doctest::Approx(beta_fn(a, b)).epsilon(1e-13));
      // polynomial factor of degree 5 is integrated exactly
      const double p5 = rule.integrate(0.0, 1.0, [](double t) { return t * t * t * t * t; });
      CHECK(p5 == doctest::Approx(beta_fn(a, b + 5)).epsilon(1e-12));
    }
  }
  // integral_0^pi |sin t|^(1/3) on the weighted cell
  const QuadratureRule rule = gauss_jacobi(16, 1.0 / 3.0, 1.0 / 3.0);
  const double got = rule.integrate(0.0, std::numbers::pi, [](double t) {
    const double w = t * (std::numbers::pi - t);
    return std::pow(std::sin(t) / w, 1.0 / 3.0);
  });
  const double exact = std::sqrt(std::numbers::pi) * std::tgamma(2.0 / 3.0) / std::tgamma(7.0 / 6.0);
  CHECK(got == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("pairwise_sum is order-fixed and accurate") {
  std::vector<double> v(100001, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(10000.1).epsilon(1e-14));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(5000);
  for (double& x : w) x = u(rng);
  CHECK(pairwise_sum(w) == pairwise_sum(w));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}
