#include <oscurve/errors.hpp>
#include <oscurve/smooth_fn.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace oscurve {
namespace {

void check_order(int k, int max_order, const char* who) {
  if (k < 0 || k > max_order) {
    throw PreconditionError(std::string("curve_geometry::") + who,
                            "derivative order " + std::to_string(k) +
                                " not available (max " +
                                std::to_string(max_order) + ")");
  }
}

}  // namespace

PolynomialFn::PolynomialFn(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)) {}

double PolynomialFn::deriv(int k, double t) const {
  check_order(k, max_order(), "PolynomialFn");
  const int deg = static_cast<int>(coeffs_.size()) - 1;
  double acc = 0.0;
  // Horner on the k-th derivative coefficients i!/(i-k)! c_i.
  for (int i = deg; i >= k; --i) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= i - j;
    acc = acc * t + falling * coeffs_[i];
  }
  return acc;
}

OscFn::OscFn(const OscFunction& f, int base_order, int extra_orders) {
  OscFunction cur = nth_derivative(f, base_order);
  derivatives_.reserve(extra_orders + 1);
  derivatives_.push_back(cur);
  for (int i = 0; i < extra_orders; ++i) {
    cur = differentiate(cur);
    derivatives_.push_back(cur);
  }
}

const OscFunction& OscFn::symbolic(int k) const {
  check_order(k, max_order(), "OscFn");
  return derivatives_[k];
}

double OscFn::deriv(int k, double t) const {
  check_order(k, max_order(), "OscFn");
  if (t == 0.0) return 0.0;
  if (t < 0.0) throw DomainError("curve_geometry::OscFn", "t must be >= 0");
  return evaluate(derivatives_[k], t).to_double();
}

std::optional<double> OscFn::frequency_hint(double t) const {
  if (!(t > 0.0)) return std::nullopt;
  const OscFunction& f = derivatives_.front();
  const double deg = std::max(0.0, f.degree());
  // phase, envelope and power-law contributions to the log-derivative
  return f.beta() * std::pow(t, -f.beta() - 1.0) +
         f.alpha() * std::pow(t, -f.alpha() - 1.0) + deg / t;
}

std::optional<double> OscFn::envelope_bound(double lo, double hi) const {
  const OscFunction& f = derivatives_.front();
  if (f.is_zero()) return 0.0;
  if (!(hi > 0.0)) return 0.0;
  lo = std::max(lo, 0.0);
  // Each term |c| t^-e exp(-t^-alpha) is unimodal with its peak at
  // t = (alpha / e)^(1 / alpha); bound it by its maximum over [lo, hi].
  const double alpha = f.alpha();
  double bound = 0.0;
  const auto add = [&](const FracPoly& p) {
    for (const auto& term : p.terms()) {
      const double e = term.exponent.value(alpha, f.beta());
      double at = hi;
      if (e > 0.0) at = std::clamp(std::pow(alpha / e, 1.0 / alpha), lo, hi);
      if (at <= 0.0) continue;
      bound += std::exp(std::log(std::abs(term.coeff)) - e * std::log(at) -
                        std::pow(at, -alpha));
    }
  };
  add(f.sin_part());
  add(f.cos_part());
  return bound;
}

double CallableFn::deriv(int k, double t) const {
  check_order(k, max_order_, "CallableFn");
  return fn_(k, t);
}

AffineFn::AffineFn(SmoothFnPtr inner, double offset, double stretch,
                   double scale, int derivative_shift)
    : inner_(std::move(inner)),
      offset_(offset),
      stretch_(stretch),
      scale_(scale),
      derivative_shift_(derivative_shift) {}

double AffineFn::deriv(int k, double t) const {
  check_order(k, max_order(), "AffineFn");
  return scale_ * std::pow(stretch_, k) *
         inner_->deriv(k + derivative_shift_, offset_ + stretch_ * t);
}

AveragedFn::AveragedFn(SmoothFnPtr inner, std::vector<double> shifts)
    : inner_(std::move(inner)), shifts_(std::move(shifts)) {
  if (shifts_.empty()) {
    throw PreconditionError("curve_geometry::AveragedFn", "no shifts");
  }
}

double AveragedFn::deriv(int k, double t) const {
  double sum = 0.0;
  for (double s : shifts_) sum += inner_->deriv(k, t + s);
  return sum / static_cast<double>(shifts_.size());
}

std::optional<double> AffineFn::frequency_hint(double t) const {
  const auto inner = inner_->frequency_hint(offset_ + stretch_ * t);
  if (!inner) return std::nullopt;
  return *inner * std::abs(stretch_);
}

std::optional<double> AffineFn::envelope_bound(double lo, double hi) const {
  if (derivative_shift_ != 0) return std::nullopt;
  const double x0 = offset_ + stretch_ * lo;
  const double x1 = offset_ + stretch_ * hi;
  const auto inner = inner_->envelope_bound(std::min(x0, x1), std::max(x0, x1));
  if (!inner) return std::nullopt;
  return *inner * std::abs(scale_);
}

SmoothFnPtr derivative_of(SmoothFnPtr f, int order) {
  return std::make_shared<AffineFn>(std::move(f), 0.0, 1.0, 1.0, order);
}

SmoothFnPtr sine_torsion_fn(int n, double c, double amp) {
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return std::make_shared<CallableFn>(
      [n, c, amp, fact](int k, double t) {
        // d^k/dt^k sin(t + phase) = sin(t + phase + k pi / 2)
        const double phase = (k - n) * std::numbers::pi / 2.0;
        double poly = 0.0;
        if (k <= n) {
          double falling = 1.0;
          for (int j = 0; j < k; ++j) falling *= n - j;
          poly = c * falling * std::pow(t, n - k) / fact;
        }
        return poly + amp * std::sin(t + phase);
      },
      1 << 20);
}

}  // namespace oscurve
