#pragma once

#include <oscurve/smooth_fn.hpp>

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace oscurve {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// gamma(t) = (t, t^2, ..., t^(n-1), phi(t)) on a compact interval.
class SimpleCurve {
 public:
  SimpleCurve(int n, SmoothFnPtr phi, Interval domain);

  int dimension() const { return n_; }
  const SmoothFn& phi() const { return *phi_; }
  const SmoothFnPtr& phi_ptr() const { return phi_; }
  const Interval& domain() const { return domain_; }

  Eigen::VectorXd point(double t) const { return derivative(0, t); }
  /// gamma^(k)(t).
  Eigen::VectorXd derivative(int k, double t) const;

 private:
  int n_;
  SmoothFnPtr phi_;
  Interval domain_;
};

/// prod_{k=1}^{n-1} k!, the factor in torsion = K_n phi^(n).
double torsion_constant(int n);

/// det[gamma'(t), ..., gamma^(n)(t)].
double torsion(const SimpleCurve& c, double t);

/// |torsion|^(2/(n(n+1)) + eps).
double affine_weight(const SimpleCurve& c, double t, double eps);

struct OffspringSpec {
  std::vector<double> shifts;  ///< 0 <= shifts[0] <= ... <= shifts[N-1]
  SimpleCurve base;
};

/// gamma_alpha(t) = (1/N) sum_k gamma(t + alpha_k) on [a - alpha_1, b - alpha_N].
class OffspringCurve {
 public:
  explicit OffspringCurve(OffspringSpec spec);

  int dimension() const { return base_.dimension(); }
  const Interval& domain() const { return domain_; }
  /// Phi_alpha, the averaged last coordinate.
  const SmoothFnPtr& last_coordinate() const { return last_; }
  Eigen::VectorXd derivative(int k, double t) const;
  Eigen::VectorXd point(double t) const { return derivative(0, t); }

 private:
  SimpleCurve base_;
  std::vector<double> shifts_;
  Interval domain_;
  SmoothFnPtr last_;
};

struct OffspringReport {
  OffspringCurve curve;
  double base_min = 0.0;  ///< sampled min |phi^(n)| on the base interval
  double base_max = 0.0;
  double min_abs = 0.0;   ///< sampled min |Phi_alpha^(n)| on I_alpha
  double max_abs = 0.0;
  /// 1/2 <= |phi^(n)| <= 1 at every base sample.
  bool base_nondegenerate = false;
  /// 1/2 <= |Phi_alpha^(n)| <= 1 at every offspring sample.
  bool inherited = false;
};

/// Builds gamma_alpha and checks the [1/2, 1] torsion band by sampling.
OffspringReport offspring(const OffspringSpec& spec, std::size_t samples = 2001);

/// h_2 ... h_n prod_{2<=i<j<=n} (h_j - h_i).
double vandermonde_factor(std::span<const double> h);

/// (t, h_2, ..., h_n) with 0 <= h_2 <= ... <= h_n.
struct OrderedSimplexPoint {
  double t = 0.0;
  std::vector<double> h;
};

/// det[gamma'(t), gamma'(t + h_2), ..., gamma'(t + h_n)].
double offspring_determinant(const SimpleCurve& c, const OrderedSimplexPoint& p);

/// J(t, h) = |offspring_determinant| / n^n.
double offspring_jacobian(const SimpleCurve& c, const OrderedSimplexPoint& p);

/// Lower bound constant in J(t, h) >= C_n v(h) under 1/2 <= |phi^(n)| <= 1.
double jacobian_lower_constant(int n);

/// det / v(h). Equals phi^(n)(xi) for some xi in (t, t + h_n).
double rolle_ratio(const SimpleCurve& c, const OrderedSimplexPoint& p);

/// Uniform ordered simplex point: t and t + h_n in the domain, via sorted
/// uniform draws.
OrderedSimplexPoint sample_simplex_point(const Interval& domain, int n,
                                         std::mt19937_64& rng);

using ComplexFn = std::function<std::complex<double>(double)>;

struct ExtensionOptions {
  double abs_tol = 1e-10;
  std::size_t max_evaluations = 20'000'000;
  /// Upper bound on panel width before frequency capping.
  double max_panel = 0.0625;
};

struct ExtensionResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// integral over the domain of exp(i gamma(t).x) g(t) dt. Throws BudgetError
/// (carrying the best estimate) if the tolerance is not reached.
ExtensionResult extension_op(const SimpleCurve& c, const ComplexFn& g,
                             const Eigen::VectorXd& x,
                             const ExtensionOptions& options = {});

}  // namespace oscurve
