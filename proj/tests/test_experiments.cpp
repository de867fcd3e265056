#include "oracles.hpp"

#include <oscurve/errors.hpp>
#include <oscurve/experiments.hpp>
#include <oscurve/smooth_fn.hpp>

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

using namespace oscurve;

TEST_CASE("exponent pairs") {
  const ExponentPair a(1.2, 1.0, 3);
  CHECK(a.p_conjugate() == doctest::Approx(6.0));
  CHECK(a.weight_exponent() == doctest::Approx(1.0 / 6.0));
  CHECK(a.in_closed_range() == false);  // 1.2 >= 14/12

  const ExponentPair b(1.1, 1.5, 3);  // p' = 11, endline q = 11/6
  CHECK(b.in_closed_range());
  CHECK(b.in_open_range());
  CHECK_FALSE(b.on_endline());

  const ExponentPair e(1.25, 5.0 / 3.0, 2);  // p' = 5, endline q = 5/3
  CHECK(e.on_endline());
  CHECK_FALSE(e.in_open_range());
  const double pc = 1.05 / 0.05;
  CHECK(ExponentPair(1.05, pc / 6.0, 3).on_endline());
  CHECK(ExponentPair(1.05, 3.5, 3).on_endline());
  CHECK_FALSE(ExponentPair(1.05, 3.6, 3).in_closed_range());
  CHECK_FALSE(ExponentPair(1.5, 1.0, 2).in_closed_range());

  const ExponentPair one(1.0, 5.0, 4);
  CHECK(std::isinf(one.p_conjugate()));
  CHECK(one.in_closed_range());

  CHECK_THROWS_AS(ExponentPair(0.9, 1.0, 3), PreconditionError);
  CHECK_THROWS_AS(ExponentPair(1.1, 0.5, 3), PreconditionError);
  CHECK_THROWS_AS(ExponentPair(1.1, 1.0, 1), PreconditionError);
  CHECK_THROWS_AS(ExponentPair(1.1, 1.0, 3, -0.1), PreconditionError);
}

TEST_CASE("Knapp exponents and profile") {
  const KnappExponent k3 = knapp_rhs_exponent(KnappProfile(3, 1.0, 0.1), ExponentPair(1.2, 1.0, 3));
  CHECK(k3.poly_exp == doctest::Approx(0.5));
  CHECK(k3.exp_coeff == doctest::Approx(1.0 / 6.0));
  CHECK_FALSE(k3.p_is_one);

  const KnappExponent k2 = knapp_rhs_exponent(KnappProfile(2, 1.0, 0.1), ExponentPair(1.5, 1.0, 2));
  CHECK(k2.poly_exp == doctest::Approx(1.0 / 3.0));
  CHECK(k2.exp_coeff == doctest::Approx(1.0 / 3.0));

  const KnappExponent near1 =
      knapp_rhs_exponent(KnappProfile(3, 1.0, 0.1), ExponentPair(1.0 + 1e-9, 1.0, 3));
  CHECK(near1.poly_exp < 1e-8);
  CHECK(near1.exp_coeff < 1e-8);
  const KnappExponent at1 = knapp_rhs_exponent(KnappProfile(3, 1.0, 0.1), ExponentPair(1.0, 1.0, 3));
  CHECK(at1.p_is_one);
  CHECK(at1.poly_exp == 0.0);
  CHECK(at1.exp_coeff == 0.0);

  const KnappProfile prof(4, 1.0, 0.2);
  REQUIRE(prof.scales.size() == 3);
  CHECK(prof.scales[2] == doctest::Approx(0.008));
  CHECK(prof.last_scale.log_abs() == doctest::Approx(-5.0));
  CHECK_THROWS_AS(KnappProfile(3, 1.0, 1.5), PreconditionError);
}

TEST_CASE("Knapp membership of the seed family") {
  std::mt19937_64 rng(4);
  for (int n : {2, 3, 4}) {
    const OscFunction phi = OscFunction::seed(1.0, 3.0);
    const SimpleCurve curve(n, std::make_shared<OscFn>(phi), {0.0, 1.0});
    for (double delta : {0.05, 0.1, 0.2}) {
      const KnappProfile prof(n, 1.0, delta);
      std::uniform_real_distribution<double> u(0.0, delta);
      for (int i = 0; i < 1000; ++i) {
        double t = u(rng);
        if (t == 0.0) t = delta;
        CHECK(knapp_membership(phi, prof, t));
        CHECK(knapp_membership(curve, prof, t));
      }
      CHECK(knapp_membership(phi, prof, delta));
      CHECK_FALSE(knapp_membership(phi, prof, std::min(0.99, 1.5 * delta)));
    }
  }
  CHECK_THROWS_AS(knapp_membership(OscFunction::seed(1.0, 3.0), KnappProfile(3, 1.0, 0.1), 0.0),
                  DomainError);
}

TEST_CASE("rescaled piece bound") {
  const ExponentPair pair(1.2, 1.0, 3);  // p' = 6
  CHECK(rescaled_piece_bound(1.0, pair) == 1.0);
  for (int k : {1, 6, 30}) {
    CHECK(rescaled_piece_bound(std::ldexp(1.0, -k), pair) ==
          doctest::Approx(std::exp2(k / 6.0)).epsilon(1e-12));
    CHECK(rescaled_piece_bound(std::ldexp(1.0, -k), ExponentPair(1.0, 1.0, 3)) == 1.0);
  }
  CHECK(rescaled_piece_bound(1e-6, ExponentPair(1.0 + 1e-10, 1.0, 3)) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("appendix integral: calibration mode") {
  AppendixOptions opt;
  opt.calibration = true;
  for (double delta : {0.05, 0.2, 0.3}) {
    const AppendixResult r = appendix_integral({3, 1.0, 3.0}, delta, 1.0 / 6.0, opt);
    CHECK(r.t_min > 0.0);
    CHECK(r.t_min < delta);
    CHECK(r.value.to_double() == doctest::Approx(delta - r.t_min).epsilon(1e-10));
  }
}

TEST_CASE("appendix integral against the u-substitution oracle") {
  struct Case {
    SeedFamily f;
    double rho;
    double delta;
  };
  for (const Case& c : {Case{{3, 1.0, 3.0}, 1.0 / 6.0, 0.2}, Case{{2, 1.0, 2.0}, 1.0 / 3.0, 0.1},
                        Case{{3, 0.5, 2.0}, 1.0 / 6.0, 0.05}, Case{{3, 1.0, 1.5}, 1.0 / 6.0, 0.2}}) {
    const AppendixResult lib = appendix_integral(c.f, c.delta, c.rho);
    const oracle::UIntegral ref =
        oracle::u_substitution_integral(c.f.n, c.f.alpha, c.f.beta, c.rho, c.delta);
    CHECK(std::abs(std::expm1(lib.value.log_abs() - ref.log_value)) <= 1e-4);
    CHECK(lib.tail_bound <= lib.value * ExtendedReal(1e-10));
    CHECK(lib.value == lib.exact_part + lib.averaged_part);
  }
}

TEST_CASE("appendix integral: preconditions and exponent") {
  CHECK_THROWS_AS(appendix_integral({3, 2.0, 2.0}, 0.1, 1.0 / 6.0), PreconditionError);
  CHECK_THROWS_AS(appendix_integral({3, 1.0, 3.0}, 0.1, 0.0), PreconditionError);
  CHECK_THROWS_AS(appendix_integral({3, 1.0, 3.0}, 0.9, 1.0 / 6.0), PreconditionError);
  CHECK(appendix_exponent({3, 1.0, 3.0}, 1.0 / 6.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(appendix_exponent({3, 1.0, 1.5}, 1.0 / 6.0) == doctest::Approx(0.75));
  CHECK(appendix_exponent({2, 1.0, 2.0}, 1.0 / 3.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("the lower-bound constant is stable where the exponent is reached") {
  const SeedFamily f{3, 1.0, 3.0};
  double lo = 1e300, hi = 0.0;
  for (double delta : default_delta_grid()) {
    const double c = appendix_constant(f, 1.0 / 6.0, delta, appendix_integral(f, delta, 1.0 / 6.0).value);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo <= 3.0);
}

TEST_CASE("default grid") {
  const std::vector<double> g = default_delta_grid();
  REQUIRE(g.size() == 12);
  CHECK(g.front() == 0.03);
  CHECK(g.back() == 0.3);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(10.0, 1.0 / 11.0)));
  }
}

TEST_CASE("sharpness for beta = 3 diverges with slope -1/2") {
  const SharpnessReport rep = sharpness_test({3, 1.0, 3.0}, default_delta_grid());
  CHECK(rep.predicted_slope == doctest::Approx(-0.5));
  CHECK(rep.ratio_slope == doctest::Approx(-0.5).epsilon(0.05));
  CHECK(rep.verdict == Verdict::Diverges);
  CHECK(to_string(rep.verdict) == "diverges");
  CHECK_THROWS_AS(sharpness_test({3, 1.0, 0.5}, default_delta_grid()), PreconditionError);
  CHECK_THROWS_AS(sharpness_test({3, 1.0, 3.0}, {0.1, 0.4}), PreconditionError);
}

TEST_CASE("block tail ratio") {
  std::vector<double> geo, flat, grow;
  for (int k = 0; k < 30; ++k) {
    geo.push_back(std::exp2(-0.1 * k));
    flat.push_back(3.0);
    grow.push_back(k + 1.0);
  }
  CHECK(block_tail_ratio(geo) == doctest::Approx(std::exp2(-1.0)));
  CHECK(block_tail_ratio(flat) == 1.0);
  CHECK(block_tail_ratio(grow) > 1.0);
  CHECK(std::isnan(block_tail_ratio({1.0, 2.0})));
}

TEST_CASE("dyadic sum flips at the endline when the counts stay bounded") {
  // A cubic with three simple roots: N_k is eventually constant.
  const PolynomialFn cubic({-0.144, 0.9, -1.7, 1.0});
  const double pc = 1.05 / 0.05;
  const double endline = pc / 6.0;
  const DyadicSumReport below = dyadic_restriction_sum(cubic, ExponentPair(1.05, 0.9 * endline, 3), 0, 30);
  const DyadicSumReport at = dyadic_restriction_sum(cubic, ExponentPair(1.05, endline, 3), 0, 30);
  CHECK(below.numeric_converges);
  CHECK_FALSE(below.numeric_diverges);
  CHECK(at.numeric_diverges);
  CHECK(at.tail_ratio == doctest::Approx(1.0).epsilon(1e-2));
  for (const DyadicSumReport* r : {&below, &at}) {
    for (std::size_t i = 1; i < r->partial_sums.size(); ++i) {
      CHECK(r->partial_sums[i] >= r->partial_sums[i - 1]);
    }
    for (bool g : r->gap) CHECK_FALSE(g);
  }
  CHECK(below.limiting_holds);
  CHECK_FALSE(at.limiting_holds);
  CHECK(below.lhs == doctest::Approx(1.0 / 6.0));
  CHECK(below.rhs == doctest::Approx(0.9 / 6.0 + 1.0 / (1e9 - 3.0)));
  CHECK(below.analytic_holds);

  DyadicSumOptions rough;
  rough.alpha_proxy = 8.0;  // 1/(8 - 3) = 0.2 swamps the margin
  CHECK_FALSE(dyadic_restriction_sum(cubic, ExponentPair(1.05, 0.9 * endline, 3), 0, 5, rough)
                  .analytic_holds);
  CHECK_THROWS_AS(dyadic_restriction_sum(cubic, ExponentPair(1.05, endline, 3), 3, 2),
                  PreconditionError);
}

TEST_CASE("dyadic sum over the seed family has nondecreasing partial sums") {
  const OscFn phi3(OscFunction::seed(1.0, 2.0), 3, 2);
  const int k0 = dyadic_start_level(phi3, {0.0, 1.0});
  const DyadicSumReport rep = dyadic_restriction_sum(phi3, ExponentPair(1.05, 3.5, 3), k0, k0 + 12);
  REQUIRE(rep.terms.size() == 13);
  for (double t : rep.terms) CHECK(t >= 0.0);
  for (std::size_t i = 1; i < rep.partial_sums.size(); ++i) {
    CHECK(rep.partial_sums[i] >= rep.partial_sums[i - 1]);
  }
  CHECK(rep.counts.front() > 0);
}
