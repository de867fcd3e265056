#include <oscurve/curve.hpp>
#include <oscurve/errors.hpp>
#include <oscurve/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oscurve {
namespace {

double falling_power(int j, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= j - i;
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// d^k/dt^k of t^j.
double monomial_derivative(int j, int k, double t) {
  if (k > j) return 0.0;
  return falling_power(j, k) * std::pow(t, j - k);
}

void check_simplex_point(const SimpleCurve& c, const OrderedSimplexPoint& p,
                         const char* who) {
  const std::string op = std::string("curve_geometry::") + who;
  const int n = c.dimension();
  if (static_cast<int>(p.h.size()) != n - 1) {
    throw DomainError(op, "need n - 1 = " + std::to_string(n - 1) + " offsets");
  }
  double prev = 0.0;
  for (double h : p.h) {
    if (!(h >= prev)) throw DomainError(op, "offsets must satisfy 0 <= h_2 <= ... <= h_n");
    prev = h;
  }
  if (!c.domain().contains(p.t) || !c.domain().contains(p.t + p.h.back())) {
    throw DomainError(op, "t and t + h_n must lie in the curve domain");
  }
}

}  // namespace

SimpleCurve::SimpleCurve(int n, SmoothFnPtr phi, Interval domain)
    : n_(n), phi_(std::move(phi)), domain_(domain) {
  if (n < 2) throw PreconditionError("curve_geometry::SimpleCurve", "need n >= 2");
  if (!phi_) throw PreconditionError("curve_geometry::SimpleCurve", "null phi");
  if (!(domain.hi >= domain.lo)) {
    throw DomainError("curve_geometry::SimpleCurve", "empty domain");
  }
}

Eigen::VectorXd SimpleCurve::derivative(int k, double t) const {
  Eigen::VectorXd v(n_);
  for (int j = 1; j < n_; ++j) v(j - 1) = monomial_derivative(j, k, t);
  v(n_ - 1) = phi_->deriv(k, t);
  return v;
}

namespace {

// Determinant after scaling every row by a power of two so that its
// largest entry lies in [1/2, 1); the scalings are exact.
double equilibrated_determinant(Eigen::MatrixXd m) {
  int exponent_sum = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double peak = m.row(i).cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;
    int e = 0;
    std::frexp(peak, &e);
    m.row(i) *= std::ldexp(1.0, -e);
    exponent_sum += e;
  }
  return std::ldexp(m.partialPivLu().determinant(), exponent_sum);
}

}  // namespace

double torsion_constant(int n) {
  double out = 1.0;
  for (int k = 1; k < n; ++k) out *= factorial(k);
  return out;
}

double torsion(const SimpleCurve& c, double t) {
  if (!c.domain().contains(t)) {
    throw DomainError("curve_geometry::torsion", "t outside the curve domain");
  }
  const int n = c.dimension();
  Eigen::MatrixXd m(n, n);
  for (int k = 1; k <= n; ++k) m.col(k - 1) = c.derivative(k, t);
  return equilibrated_determinant(std::move(m));
}

double affine_weight(const SimpleCurve& c, double t, double eps) {
  const int n = c.dimension();
  const double exponent = 2.0 / (n * (n + 1.0)) + eps;
  const double tau = torsion(c, t);
  if (tau == 0.0) {
    if (exponent > 0.0) return 0.0;
    throw DegenerateError("curve_geometry::affine_weight",
                          "zero torsion with non-positive weight exponent");
  }
  return std::pow(std::abs(tau), exponent);
}

OffspringCurve::OffspringCurve(OffspringSpec spec)
    : base_(std::move(spec.base)), shifts_(std::move(spec.shifts)) {
  static const std::string kOp = "curve_geometry::offspring";
  if (shifts_.empty()) throw PreconditionError(kOp, "need at least one shift");
  if (shifts_.front() < 0.0 || !std::is_sorted(shifts_.begin(), shifts_.end())) {
    throw PreconditionError(kOp, "shifts must satisfy 0 <= alpha_1 <= ... <= alpha_N");
  }
  domain_ = {base_.domain().lo - shifts_.front(), base_.domain().hi - shifts_.back()};
  if (domain_.lo > domain_.hi) throw DomainError(kOp, "empty offspring interval");
  last_ = std::make_shared<AveragedFn>(base_.phi_ptr(), shifts_);
}

Eigen::VectorXd OffspringCurve::derivative(int k, double t) const {
  const int n = base_.dimension();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (double s : shifts_) {
    for (int j = 1; j < n; ++j) v(j - 1) += monomial_derivative(j, k, t + s);
  }
  v.head(n - 1) /= static_cast<double>(shifts_.size());
  v(n - 1) = last_->deriv(k, t);
  return v;
}

OffspringReport offspring(const OffspringSpec& spec, std::size_t samples) {
  OffspringCurve curve(spec);
  const int n = spec.base.dimension();
  const auto scan = [&](const SmoothFn& f, const Interval& dom, double& lo, double& hi) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    bool in_band = true;
    const std::size_t m = std::max<std::size_t>(samples, 2);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = dom.lo + dom.width() * i / (m - 1.0);
      const double v = std::abs(f.deriv(n, t));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      in_band = in_band && v >= 0.5 && v <= 1.0;
    }
    return in_band;
  };
  OffspringReport report{curve};
  report.base_nondegenerate =
      scan(spec.base.phi(), spec.base.domain(), report.base_min, report.base_max);
  report.inherited =
      scan(*curve.last_coordinate(), curve.domain(), report.min_abs, report.max_abs);
  return report;
}

double vandermonde_factor(std::span<const double> h) {
  double out = 1.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    out *= h[i];
    for (std::size_t j = i + 1; j < h.size(); ++j) out *= h[j] - h[i];
  }
  return out;
}

double offspring_determinant(const SimpleCurve& c, const OrderedSimplexPoint& p) {
  check_simplex_point(c, p, "offspring_jacobian");
  const int n = c.dimension();
  Eigen::MatrixXd m(n, n);
  m.col(0) = c.derivative(1, p.t);
  for (int k = 1; k < n; ++k) m.col(k) = c.derivative(1, p.t + p.h[k - 1]);
  return equilibrated_determinant(std::move(m));
}

double offspring_jacobian(const SimpleCurve& c, const OrderedSimplexPoint& p) {
  const int n = c.dimension();
  return std::abs(offspring_determinant(c, p)) / std::pow(n, n);
}

double jacobian_lower_constant(int n) {
  return 1.0 / (2.0 * std::pow(n, n) * factorial(n));
}

double rolle_ratio(const SimpleCurve& c, const OrderedSimplexPoint& p) {
  check_simplex_point(c, p, "rolle_ratio");
  const double v = vandermonde_factor(p.h);
  if (v == 0.0) throw DegenerateError("curve_geometry::rolle_ratio", "v(h) = 0");
  return offspring_determinant(c, p) / v;
}

OrderedSimplexPoint sample_simplex_point(const Interval& domain, int n,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(domain.lo, domain.hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  std::sort(x.begin(), x.end());
  OrderedSimplexPoint p{x[0], {}};
  for (int k = 1; k < n; ++k) p.h.push_back(x[k] - x[0]);
  return p;
}

ExtensionResult extension_op(const SimpleCurve& c, const ComplexFn& g,
                             const Eigen::VectorXd& x,
                             const ExtensionOptions& options) {
  static const std::string kOp = "curve_geometry::extension_op";
  if (x.size() != c.dimension()) throw PreconditionError(kOp, "x has wrong dimension");
  static const QuadratureRule rule = gauss_legendre(20);
  const Interval dom = c.domain();
  ExtensionResult result;
  if (dom.width() == 0.0) return result;

  const auto integrand = [&](double t) {
    return std::exp(std::complex<double>(0.0, c.point(t).dot(x))) * g(t);
  };
  const auto panel = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      sum += rule.weights[i] * integrand(lo + half * (rule.nodes[i] + 1.0));
    }
    result.evaluations += rule.size();
    return sum * half;
  };

  // Frequency-capped initial panels: width <= pi / |gamma'(t) . x|.
  std::vector<std::pair<double, double>> stack;
  const double cap = options.max_panel * dom.width();
  for (double t = dom.lo; t < dom.hi;) {
    const double freq = std::abs(c.derivative(1, t).dot(x));
    double w = freq > 0.0 ? std::min(cap, std::numbers::pi / freq) : cap;
    double next = std::min(dom.hi, t + w);
    if (dom.hi - next < 1e-3 * w) next = dom.hi;
    stack.emplace_back(t, next);
    t = next;
  }
  std::reverse(stack.begin(), stack.end());

  std::complex<double> accepted = 0.0;
  double accepted_err = 0.0;
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (lo + hi);
    const std::complex<double> whole = panel(lo, hi);
    const std::complex<double> halves = panel(lo, mid) + panel(mid, hi);
    const double err = std::abs(whole - halves);
    const double budget = options.abs_tol * (hi - lo) / dom.width();
    if (err <= budget || mid <= lo || mid >= hi) {
      accepted += halves;
      accepted_err += err;
      continue;
    }
    if (result.evaluations > options.max_evaluations) {
      std::complex<double> best = accepted + halves;
      double bound = accepted_err + err;
      for (const auto& [a, b] : stack) {
        const double m = 0.5 * (a + b);
        const std::complex<double> h2 = panel(a, m) + panel(m, b);
        best += h2;
        bound += std::abs(panel(a, b) - h2);
      }
      throw BudgetError(kOp, "tolerance not reached within evaluation budget",
                        best.real(), best.imag(), bound);
    }
    stack.emplace_back(mid, hi);
    stack.emplace_back(lo, mid);
  }
  result.value = accepted;
  result.error_estimate = accepted_err;
  return result;
}

}  // namespace oscurve
