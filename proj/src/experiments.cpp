#include <oscurve/experiments.hpp>

#include <oscurve/errors.hpp>
#include <oscurve/fit.hpp>
#include <oscurve/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace oscurve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtendedReal pairwise_sum(std::span<const ExtendedReal> v) {
  if (v.empty()) return ExtendedReal(0.0);
  if (v.size() == 1) return v[0];
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

/// Sum of w_i exp(l_i) as an ExtendedReal.
ExtendedReal weighted_log_sum(std::span<const double> weights,
                              std::span<const double> logs) {
  double lmax = -kInf;
  for (double l : logs) lmax = std::max(lmax, l);
  if (lmax == -kInf) return ExtendedReal(0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) s += weights[i] * std::exp(logs[i] - lmax);
  if (!(s > 0.0)) return ExtendedReal(0.0);
  return ExtendedReal::from_log(lmax + std::log(s));
}

/// Mean of |sin|^rho over a period.
double mean_abs_sin_pow(double rho) {
  return std::tgamma(0.5 * (rho + 1.0)) /
         (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * rho + 1.0));
}

}  // namespace

ExponentPair::ExponentPair(double p_, double q_, int n_, double eps_)
    : p(p_), q(q_), n(n_), eps(eps_) {
  if (!(p >= 1.0) || !(q >= 1.0) || n < 2 || !(eps >= 0.0)) {
    throw PreconditionError("restriction_experiments::ExponentPair",
                            "require p >= 1, q >= 1, n >= 2, eps >= 0");
  }
}

double ExponentPair::p_conjugate() const {
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

double ExponentPair::weight_exponent() const {
  return 2.0 / static_cast<double>(n * n + n);
}

namespace {

constexpr double kEndlineRelTol = 1e-12;

bool near_endline(double q, double endline) {
  return std::abs(q - endline) <= kEndlineRelTol * endline;
}

}  // namespace

bool ExponentPair::in_closed_range() const {
  const double pmax = static_cast<double>(n * n + n + 2) / static_cast<double>(n * n + n);
  const double endline = weight_exponent() * p_conjugate();
  return p >= 1.0 && p < pmax && q >= 1.0 && (q <= endline || near_endline(q, endline));
}

bool ExponentPair::on_endline() const {
  return in_closed_range() && near_endline(q, weight_exponent() * p_conjugate());
}

bool ExponentPair::in_open_range() const {
  return in_closed_range() && !on_endline();
}

KnappProfile::KnappProfile(int n_, double alpha_, double delta_)
    : n(n_), alpha(alpha_), delta(delta_) {
  if (n < 2 || !(alpha > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("restriction_experiments::KnappProfile",
                            "require n >= 2, alpha > 0, 0 < delta < 1");
  }
  scales.reserve(n - 1);
  for (int j = 0; j + 1 < n; ++j) scales.push_back(std::pow(delta, j + 1));
  last_scale = ExtendedReal::exp(-std::pow(delta, -alpha));
}

namespace {

bool polynomial_coords_inside(const KnappProfile& prof, double t) {
  if (!(t > 0.0)) {
    throw DomainError("restriction_experiments::knapp_membership", "t must be > 0");
  }
  for (int j = 0; j + 1 < prof.n; ++j) {
    if (std::pow(t, j + 1) > prof.scales[j]) return false;
  }
  return true;
}

}  // namespace

bool knapp_membership(const OscFunction& phi, const KnappProfile& prof, double t) {
  if (!polynomial_coords_inside(prof, t)) return false;
  return evaluate(phi, t).abs() <= prof.last_scale;
}

bool knapp_membership(const SimpleCurve& curve, const KnappProfile& prof, double t) {
  if (curve.dimension() != prof.n) {
    throw PreconditionError("restriction_experiments::knapp_membership",
                            "curve dimension differs from the profile");
  }
  if (!polynomial_coords_inside(prof, t)) return false;
  return ExtendedReal(curve.phi()(t)).abs() <= prof.last_scale;
}

KnappExponent knapp_rhs_exponent(const KnappProfile& prof, const ExponentPair& pair) {
  KnappExponent e;
  if (pair.p == 1.0) {
    e.p_is_one = true;
    return e;
  }
  const double pc = pair.p_conjugate();
  e.poly_exp = static_cast<double>(prof.n * (prof.n - 1)) / (2.0 * pc);
  e.exp_coeff = 1.0 / pc;
  return e;
}

double rescaled_piece_bound(double r, const ExponentPair& pair) {
  if (!(r > 0.0)) {
    throw PreconditionError("restriction_experiments::rescaled_piece_bound",
                            "r must be positive");
  }
  if (pair.p == 1.0) return 1.0;
  return std::pow(r, -1.0 / pair.p_conjugate());
}

double appendix_exponent(const SeedFamily& f, double rho) {
  return -rho * f.n * (f.beta + 1.0) + 1.0 + f.alpha;
}

double appendix_constant(const SeedFamily& f, double rho, double delta,
                         const ExtendedReal& j_value) {
  const double log_c = j_value.log_abs() + rho * std::pow(delta, -f.alpha) -
                       appendix_exponent(f, rho) * std::log(delta);
  return std::exp(log_c);
}

AppendixResult appendix_integral(const SeedFamily& family, double delta, double rho,
                                 const AppendixOptions& options) {
  constexpr const char* kOp = "restriction_experiments::appendix_integral";
  if (family.n < 1 || !(family.alpha > 0.0) || !(family.beta > family.alpha)) {
    throw PreconditionError(kOp, "require n >= 1 and beta > alpha > 0");
  }
  if (!(rho > 0.0)) throw PreconditionError(kOp, "rho must be positive");
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw PreconditionError(kOp, "delta must lie in (0, 0.5]");
  }

  const OscFunction g =
      nth_derivative(OscFunction::seed(family.alpha, family.beta), family.n);
  const double alpha = g.alpha();
  const bool calib = options.calibration;

  const QuadratureRule both = gauss_jacobi(options.cell_order, rho, rho);
  const QuadratureRule upper_open = gauss_jacobi(options.cell_order, 0.0, rho);
  const QuadratureRule legendre = gauss_legendre(options.cell_order);
  const QuadratureRule panel_rule = gauss_legendre(options.panel_order);

  const auto log_abs_g = [&](double t) {
    const ScaledValue c = g.core(t);
    return std::log(std::abs(c.value)) + c.log_scale - std::pow(t, -alpha);
  };

  // One cell [lo, hi] with zeros of g at lo, and at hi unless hi_open.
  std::vector<double> logs(options.cell_order);
  const auto unit_cell = [&](double lo, double hi) {
    return ExtendedReal(legendre.integrate(lo, hi, [](double) { return 1.0; }));
  };
  const auto cell = [&](double lo, double hi, bool hi_open) {
    const double half = 0.5 * (hi - lo);
    const QuadratureRule& rule = hi_open ? upper_open : both;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double x = rule.nodes[i];
      const double t = lo + half * (x + 1.0);
      double l = rho * log_abs_g(t) - rho * std::log(half * (1.0 + x));
      if (!hi_open) l -= rho * std::log(half * (1.0 - x));
      logs[i] = l;
    }
    const double exponent = rule.a + rule.b + 1.0;
    return weighted_log_sum(rule.weights, logs) *
           ExtendedReal::from_log(exponent * std::log(half));
  };

  AppendixResult result;
  std::vector<ExtendedReal> exact;
  std::vector<ExtendedReal> exact_unit;
  NodeOptions node_opt;
  node_opt.max_nodes = options.max_exact_cells + 16;

  // Walk downward from delta through node-aligned cells.
  double prev_node = -1.0;
  double chunk_hi = delta;
  ExtendedReal last_cell;
  bool switched = false;
  std::size_t cells = 0;
  while (!switched) {
    const double span =
        64.0 * std::numbers::pi * std::pow(chunk_hi, g.beta() + 1.0) / g.beta();
    const double chunk_lo = std::max(chunk_hi * 0.75, chunk_hi - span);
    std::vector<double> nodes = oscillation_nodes(g, chunk_lo, chunk_hi, node_opt);
    std::sort(nodes.begin(), nodes.end(), std::greater<>());
    for (double node : nodes) {
      if (prev_node < 0.0) {
        if (node < delta) {
          exact.push_back(cell(node, delta, true));
          exact_unit.push_back(unit_cell(node, delta));
        }
        prev_node = node;
        continue;
      }
      if (!(node < prev_node)) continue;
      const ExtendedReal c = cell(node, prev_node, false);
      exact.push_back(c);
      exact_unit.push_back(unit_cell(node, prev_node));
      ++cells;
      prev_node = node;
      if (cells >= options.min_exact_cells && !last_cell.is_zero() &&
          std::abs(c.log_abs() - last_cell.log_abs()) < options.switch_log_change) {
        switched = true;
        break;
      }
      last_cell = c;
      if (cells >= options.max_exact_cells) {
        throw ResolutionError(kOp, "exact cell budget exhausted", node, delta);
      }
    }
    chunk_hi = chunk_lo;
    if (chunk_hi < 1e-300) throw ResolutionError(kOp, "no oscillation nodes", 0.0, delta);
  }
  result.exact_cells = cells;
  result.t_switch = prev_node;
  result.exact_part = pairwise_sum(exact);

  // The envelope is increasing below t_star, which makes t * env(t)^rho a
  // bound for the integral over [0, t].
  const double e_max = std::max(g.sin_part().degree(), g.cos_part().degree());
  const double t_star = e_max > 0.0 ? std::pow(alpha / e_max, 1.0 / alpha) : kInf;
  const auto log_tail = [&](double t) {
    return std::log(t) + rho * g.log_envelope(t);
  };
  const double log_target = std::log(options.tail_rel) + result.exact_part.log_abs();
  double hi = std::min(result.t_switch, t_star);
  double t_min = hi;
  if (log_tail(hi) > log_target) {
    double lo = hi;
    do {
      lo *= 0.5;
      if (lo < 1e-300) throw ResolutionError(kOp, "tail bound not reachable", lo, hi);
    } while (log_tail(lo) > log_target);
    double a = std::log(lo), b = std::log(hi);
    for (int it = 0; it < 100; ++it) {
      const double m = 0.5 * (a + b);
      if (log_tail(std::exp(m)) > log_target) {
        b = m;
      } else {
        a = m;
      }
    }
    t_min = std::exp(a);
  }
  result.t_min = t_min;
  result.tail_bound = ExtendedReal::from_log(log_tail(t_min));

  // Phase-averaged integrand on [t_min, t_switch]: the zero-mean part of
  // |sin|^rho has an antiderivative vanishing at nodes, so the averaging
  // error is second order in the slow variation.
  const double c_rho = mean_abs_sin_pow(rho);
  const auto log_amplitude = [&](double t) {
    const double p = g.sin_part().evaluate(t);
    const double q = g.cos_part().evaluate(t);
    return std::log(std::hypot(p, q)) - std::pow(t, -alpha);
  };
  std::vector<ExtendedReal> panels;
  std::vector<ExtendedReal> panels_unit;
  std::vector<double> plogs(panel_rule.size());
  double p_hi = result.t_switch;
  while (p_hi > t_min) {
    const double p_lo = std::max(t_min, p_hi * 0.9);
    const double half = 0.5 * (p_hi - p_lo);
    for (std::size_t i = 0; i < panel_rule.size(); ++i) {
      const double t = p_lo + half * (panel_rule.nodes[i] + 1.0);
      plogs[i] = rho * log_amplitude(t);
    }
    panels.push_back(weighted_log_sum(panel_rule.weights, plogs) * ExtendedReal(half));
    panels_unit.push_back(
        ExtendedReal(panel_rule.integrate(p_lo, p_hi, [](double) { return 1.0; })));
    p_hi = p_lo;
  }
  result.averaged_part = pairwise_sum(panels) * ExtendedReal(c_rho);
  if (calib) {
    result.exact_part = pairwise_sum(exact_unit);
    result.averaged_part = pairwise_sum(panels_unit);
  }
  result.value = result.exact_part + result.averaged_part;
  return result;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Diverges:
      return "diverges";
    case Verdict::Bounded:
      return "bounded";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid(12);
  const double l0 = std::log(0.03), l1 = std::log(0.3);
  for (int i = 0; i < 12; ++i) grid[i] = std::exp(l0 + (l1 - l0) * i / 11.0);
  grid.front() = 0.03;
  grid.back() = 0.3;
  return grid;
}

SharpnessReport sharpness_test(const SeedFamily& family,
                               const std::vector<double>& delta_grid,
                               const AppendixOptions& options) {
  constexpr const char* kOp = "restriction_experiments::sharpness_test";
  if (!(family.beta > family.alpha)) throw PreconditionError(kOp, "require beta > alpha");
  if (delta_grid.size() < 2) throw PreconditionError(kOp, "need at least two grid points");
  for (double d : delta_grid) {
    if (!(d > 0.0 && d <= 0.3)) throw PreconditionError(kOp, "grid must lie in (0, 0.3]");
  }
  SharpnessReport rep;
  rep.n = family.n;
  rep.alpha = family.alpha;
  rep.beta = family.beta;
  rep.rho = 2.0 / static_cast<double>(family.n * (family.n + 1));
  rep.delta_grid = delta_grid;
  const double power = static_cast<double>(family.n - 1) / (family.n + 1);
  std::vector<double> xs;
  for (double d : delta_grid) {
    const AppendixResult j = appendix_integral(family, d, rep.rho, options);
    const ExtendedReal bound =
        ExtendedReal::from_log(power * std::log(d) - rep.rho * std::pow(d, -family.alpha));
    rep.j_values.push_back(j.value);
    rep.bound_values.push_back(bound);
    rep.log_ratios.push_back(j.value.log_abs() - bound.log_abs());
    xs.push_back(std::log(d));
  }
  rep.ratio_slope = linear_fit(xs, rep.log_ratios).slope;
  rep.predicted_slope = appendix_exponent(family, rep.rho) - power;
  if (rep.ratio_slope <= -0.1) {
    rep.verdict = Verdict::Diverges;
  } else if (rep.ratio_slope >= 0.1) {
    rep.verdict = Verdict::Bounded;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

double block_tail_ratio(const std::vector<double>& terms) {
  const std::size_t third = terms.size() / 3;
  if (third == 0) return std::numeric_limits<double>::quiet_NaN();
  double last = 0.0, before = 0.0;
  for (std::size_t i = terms.size() - third; i < terms.size(); ++i) last += terms[i];
  for (std::size_t i = terms.size() - 2 * third; i < terms.size() - third; ++i) {
    before += terms[i];
  }
  if (before == 0.0) return last == 0.0 ? 0.0 : kInf;
  return last / before;
}

DyadicSumReport dyadic_restriction_sum(const SmoothFn& phi_n, const ExponentPair& pair,
                                       int k_lo, int k_hi,
                                       const DyadicSumOptions& options) {
  if (k_hi < k_lo) {
    throw PreconditionError("restriction_experiments::dyadic_restriction_sum",
                            "empty k range");
  }
  DyadicSumReport rep;
  const double pc = pair.p_conjugate();
  const double q_over_pc = std::isinf(pc) ? 0.0 : pair.q / pc;
  rep.lhs = pair.weight_exponent() + pair.eps;
  const double exponent = -rep.lhs + q_over_pc;
  double partial = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    rep.ks.push_back(k);
    std::size_t count = 0;
    bool gap = false;
    try {
      count = dyadic_cover(phi_n, options.domain, k, options.cover).count();
    } catch (const ResolutionError&) {
      gap = true;
    }
    rep.counts.push_back(count);
    rep.gap.push_back(gap);
    const double term = static_cast<double>(count) * std::exp2(exponent * k);
    rep.terms.push_back(term);
    partial += term;
    rep.partial_sums.push_back(partial);
  }
  rep.tail_ratio = block_tail_ratio(rep.terms);
  rep.numeric_converges = rep.tail_ratio < 0.95;
  rep.numeric_diverges = rep.tail_ratio >= 1.0;
  const int n = pair.n;
  if (options.alpha_proxy > n) {
    rep.rhs = q_over_pc + 1.0 / (options.alpha_proxy - n);
    rep.analytic_holds = rep.lhs > rep.rhs;
  } else {
    rep.rhs = kInf;
    rep.analytic_holds = false;
  }
  rep.limiting_holds = rep.lhs > q_over_pc;
  return rep;
}

}  // namespace oscurve
