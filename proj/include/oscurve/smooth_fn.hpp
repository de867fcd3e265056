#pragma once

#include <oscurve/osc_function.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace oscurve {

/// Smooth real function of one variable with user-supplied derivatives.
class SmoothFn {
 public:
  virtual ~SmoothFn() = default;

  /// k-th derivative at t.
  virtual double deriv(int k, double t) const = 0;

  /// Highest derivative order available.
  virtual int max_order() const = 0;

  double operator()(double t) const { return deriv(0, t); }

  /// Local angular frequency of oscillation near t, if known. Samplers use
  /// it to place a fixed number of points per half period.
  virtual std::optional<double> frequency_hint(double /*t*/) const {
    return std::nullopt;
  }

  /// Upper bound for |f| on [lo, hi], if one is cheaply available.
  virtual std::optional<double> envelope_bound(double /*lo*/, double /*hi*/) const {
    return std::nullopt;
  }
};

using SmoothFnPtr = std::shared_ptr<const SmoothFn>;

/// sum_i coeffs[i] t^i.
class PolynomialFn final : public SmoothFn {
 public:
  explicit PolynomialFn(std::vector<double> coeffs);
  double deriv(int k, double t) const override;
  int max_order() const override { return 1 << 20; }
  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/*!
  k-th derivative of an OscFunction, counted from `base_order`:
  deriv(k, t) is f^(base_order + k)(t). The derivatives up to
  `base_order + extra_orders` are built symbolically at construction.
  Values at t = 0 are the limit 0; t < 0 throws DomainError.
*/
class OscFn final : public SmoothFn {
 public:
  OscFn(const OscFunction& f, int base_order = 0, int extra_orders = 4);
  double deriv(int k, double t) const override;
  int max_order() const override {
    return static_cast<int>(derivatives_.size()) - 1;
  }
  std::optional<double> frequency_hint(double t) const override;
  std::optional<double> envelope_bound(double lo, double hi) const override;
  const OscFunction& symbolic(int k) const;

 private:
  std::vector<OscFunction> derivatives_;
};

/// Wraps a callable (k, t) -> f^(k)(t).
class CallableFn final : public SmoothFn {
 public:
  using Callable = std::function<double(int, double)>;
  CallableFn(Callable fn, int max_order, double frequency = 0.0)
      : fn_(std::move(fn)), max_order_(max_order), frequency_(frequency) {}
  double deriv(int k, double t) const override;
  int max_order() const override { return max_order_; }
  std::optional<double> frequency_hint(double) const override {
    if (frequency_ > 0.0) return frequency_;
    return std::nullopt;
  }

 private:
  Callable fn_;
  int max_order_;
  double frequency_;
};

/// scale * f(offset + stretch * t), so deriv(k) picks up stretch^k.
class AffineFn final : public SmoothFn {
 public:
  AffineFn(SmoothFnPtr inner, double offset, double stretch, double scale = 1.0,
           int derivative_shift = 0);
  double deriv(int k, double t) const override;
  int max_order() const override {
    return inner_->max_order() - derivative_shift_;
  }
  std::optional<double> frequency_hint(double t) const override;
  std::optional<double> envelope_bound(double lo, double hi) const override;

 private:
  SmoothFnPtr inner_;
  double offset_;
  double stretch_;
  double scale_;
  int derivative_shift_;
};

/// (1/N) sum_k f(t + shifts[k]).
class AveragedFn final : public SmoothFn {
 public:
  AveragedFn(SmoothFnPtr inner, std::vector<double> shifts);
  double deriv(int k, double t) const override;
  int max_order() const override { return inner_->max_order(); }

 private:
  SmoothFnPtr inner_;
  std::vector<double> shifts_;
};

/// f' as a SmoothFn: deriv(k) of the result is deriv(k + order) of f.
SmoothFnPtr derivative_of(SmoothFnPtr f, int order = 1);

/// c t^n / n! + amp sin(t - n pi / 2): its n-th derivative is c + amp sin t.
SmoothFnPtr sine_torsion_fn(int n, double c, double amp);

}  // namespace oscurve
