#pragma once

#include <oscurve/extended_real.hpp>

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oscurve {

/// Exponent a*alpha + b*beta + c of a term coeff * t^-(a*alpha + b*beta + c).
struct ExponentTriple {
  int a = 0;
  int b = 0;
  int c = 0;

  constexpr double value(double alpha, double beta) const {
    return a * alpha + b * beta + c;
  }
  constexpr ExponentTriple operator+(const ExponentTriple& o) const {
    return {a + o.a, b + o.b, c + o.c};
  }
  friend constexpr auto operator<=>(const ExponentTriple&,
                                    const ExponentTriple&) = default;
};

struct Term {
  double coeff = 0.0;
  ExponentTriple exponent;

  friend bool operator==(const Term&, const Term&) = default;
};

/*!
  Finite sum of coeff * t^-(a*alpha + b*beta + c) for fixed (alpha, beta).

  Canonical form: no zero coefficients, exponents strictly decreasing in
  value, coefficients below 1e-300 of the largest dropped. Exponents that
  coincide in value are merged; the surviving triple is the one with the
  largest b, then the largest c.
*/
class FracPoly {
 public:
  FracPoly(double alpha, double beta) : alpha_(alpha), beta_(beta) {}
  FracPoly(std::vector<Term> terms, double alpha, double beta);

  std::span<const Term> terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// Value of the leading exponent; -inf for the empty polynomial.
  double degree() const;
  std::optional<ExponentTriple> leading() const;

  /// Sum of coeff * t^-exponent in plain doubles (may overflow for tiny t).
  double evaluate(double t) const;

  FracPoly operator+(const FracPoly& rhs) const;
  friend bool operator==(const FracPoly&, const FracPoly&) = default;

 private:
  double alpha_;
  double beta_;
  std::vector<Term> terms_;
};

/// Scaled evaluation of P(t) sin(t^-beta) + Q(t) cos(t^-beta):
/// the true value is `value * exp(log_scale)`; `magnitude` bounds |value|
/// by the sum of absolute term values on the same scale.
struct ScaledValue {
  double value = 0.0;
  double magnitude = 0.0;
  double log_scale = 0.0;
};

/*!
  t -> exp(-t^-alpha) (P(t) sin(t^-beta) + Q(t) cos(t^-beta)).

  The family is closed under differentiation. Immutable; per-term logs are
  cached at construction so repeated evaluation is cheap.
*/
class OscFunction {
 public:
  OscFunction(FracPoly sin_part, FracPoly cos_part);
  OscFunction(double alpha, double beta, std::vector<Term> sin_terms,
              std::vector<Term> cos_terms);

  /// exp(-t^-alpha) sin(t^-beta).
  static OscFunction seed(double alpha, double beta);

  double alpha() const { return sin_part_.alpha(); }
  double beta() const { return sin_part_.beta(); }
  const FracPoly& sin_part() const { return sin_part_; }
  const FracPoly& cos_part() const { return cos_part_; }

  bool is_zero() const { return sin_part_.empty() && cos_part_.empty(); }

  /// max{deg P, deg Q}; -inf for the zero function.
  double degree() const;

  /// Triple of max{deg P, deg Q}. Ties between P and Q are broken by the
  /// same rule FracPoly uses for merging.
  std::optional<ExponentTriple> leading_exponent() const;

  /// P sin + Q cos without the exp(-t^-alpha) factor. Requires t > 0.
  ScaledValue core(double t) const;

  /// log of exp(-t^-alpha) * sum |coeff| t^-exponent, an upper envelope of
  /// |f(t)|.
  double log_envelope(double t) const;

  OscFunction operator+(const OscFunction& rhs) const;
  friend bool operator==(const OscFunction& lhs, const OscFunction& rhs) {
    return lhs.sin_part_ == rhs.sin_part_ && lhs.cos_part_ == rhs.cos_part_;
  }

 private:
  struct Compiled {
    double log_coeff;
    double exponent;
    bool negative;
    bool is_sin;
  };

  void compile();

  FracPoly sin_part_;
  FracPoly cos_part_;
  std::vector<Compiled> compiled_;
};

OscFunction differentiate(const OscFunction& f);
OscFunction nth_derivative(const OscFunction& f, int n);

/// Value at t > 0 with the exponential carried in the binary scale.
ExtendedReal evaluate(const OscFunction& f, double t);

struct AmplitudePhase {
  double amplitude = 0.0;
  double theta = 0.0;
};

/*!
  Writes psi(u) = P0(u) sin u + Q0(u) cos u as amplitude * cos(u + theta),
  theta in (-pi, pi], where u = t^-beta and P0, Q0 are P, Q divided by
  u^(deg / beta).

  Throws DegenerateError when the amplitude vanishes.
*/
AmplitudePhase amplitude_phase(const OscFunction& f, double u);

struct NodeOptions {
  std::size_t max_nodes = 20'000'000;
  /// Final bracket width relative to t.
  double rel_width = 1e-12;
  /// Scan samples per half period of sin(t^-beta).
  double samples_per_half_period = 8.0;
};

/// Zeros of P sin + Q cos in [a, b]. Throws ResolutionError past
/// `max_nodes`.
std::vector<double> oscillation_nodes(const OscFunction& f, double a, double b,
                                      const NodeOptions& options = {});

/// One term per line: "sign |coeff| a b c sin|cos".
std::string to_term_list(const OscFunction& f);
OscFunction parse_term_list(std::string_view text, double alpha, double beta);

}  // namespace oscurve
