#pragma once

#include <oscurve/curve.hpp>
#include <oscurve/extended_real.hpp>
#include <oscurve/level_cover.hpp>
#include <oscurve/osc_function.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace oscurve {

/// Restriction exponents (p, q) for curves in R^n with weight exponent eps.
struct ExponentPair {
  double p = 1.0;
  double q = 1.0;
  int n = 2;
  double eps = 0.0;

  ExponentPair() = default;
  /// Validates p >= 1, q >= 1, n >= 2, eps >= 0.
  ExponentPair(double p, double q, int n, double eps = 0.0);

  /// p / (p - 1), +inf for p = 1.
  double p_conjugate() const;
  /// 2 / (n^2 + n).
  double weight_exponent() const;
  /// 1 <= p < (n^2+n+2)/(n^2+n) and q <= weight_exponent() * p'.
  /// Equality with the endline is tested to 1e-12 relative.
  bool in_closed_range() const;
  bool on_endline() const;
  /// In the closed range and not on the endline.
  bool in_open_range() const;
};

/// Box (delta, delta^2, ..., delta^(n-1), exp(-delta^-alpha)).
struct KnappProfile {
  int n = 2;
  double alpha = 1.0;
  double delta = 0.1;
  std::vector<double> scales;  ///< delta^(j+1), j < n - 1
  ExtendedReal last_scale;     ///< exp(-delta^-alpha)

  KnappProfile(int n, double alpha, double delta);
};

/// True iff |gamma_j(t)| <= scales[j] for all coordinates; the last
/// coordinate is compared in extended range.
bool knapp_membership(const OscFunction& phi, const KnappProfile& prof, double t);
bool knapp_membership(const SimpleCurve& curve, const KnappProfile& prof, double t);

struct KnappExponent {
  double poly_exp = 0.0;   ///< n (n - 1) / (2 p')
  double exp_coeff = 0.0;  ///< 1 / p'
  bool p_is_one = false;
};

/// ||f_delta||_p ~ C delta^poly_exp exp(-exp_coeff delta^-alpha).
KnappExponent knapp_rhs_exponent(const KnappProfile& prof, const ExponentPair& pair);

/// r^(-1/p'); 1 for p = 1.
double rescaled_piece_bound(double r, const ExponentPair& pair);

struct SeedFamily {
  int n = 3;
  double alpha = 1.0;
  double beta = 3.0;
};

struct AppendixOptions {
  int cell_order = 16;
  int panel_order = 20;
  double tail_rel = 1e-12;
  /// Exact cells continue until consecutive cell contributions differ by
  /// less than this in log, and at least min_exact_cells were done.
  double switch_log_change = 1e-2;
  std::size_t min_exact_cells = 32;
  std::size_t max_exact_cells = 2'000'000;
  /// Replace |phi^(n)|^rho by 1 (the result is then delta - t_min).
  bool calibration = false;
};

struct AppendixResult {
  ExtendedReal value;          ///< integral over [t_min, delta]
  ExtendedReal exact_part;     ///< node-aligned cells on [t_switch, delta]
  ExtendedReal averaged_part;  ///< phase-averaged part on [t_min, t_switch]
  ExtendedReal tail_bound;     ///< bound for the neglected [0, t_min]
  double t_min = 0.0;
  double t_switch = 0.0;
  std::size_t exact_cells = 0;
};

/// integral_{t_min}^{delta} |phi^(n)(t)|^rho dt for phi = exp(-t^-alpha) sin(t^-beta).
AppendixResult appendix_integral(const SeedFamily& family, double delta, double rho,
                                 const AppendixOptions& options = {});

/// -rho n (beta + 1) + 1 + alpha.
double appendix_exponent(const SeedFamily& family, double rho);

/// J exp(rho delta^-alpha) delta^(rho n (beta+1) - 1 - alpha).
double appendix_constant(const SeedFamily& family, double rho, double delta,
                         const ExtendedReal& j_value);

enum class Verdict { Diverges, Bounded, Inconclusive };
std::string to_string(Verdict v);

struct SharpnessReport {
  int n = 3;
  double alpha = 1.0;
  double beta = 3.0;
  double rho = 0.0;
  std::vector<double> delta_grid;
  std::vector<ExtendedReal> j_values;
  std::vector<ExtendedReal> bound_values;
  std::vector<double> log_ratios;
  double ratio_slope = 0.0;
  double predicted_slope = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// 12 log-spaced points in [0.03, 0.3].
std::vector<double> default_delta_grid();

SharpnessReport sharpness_test(const SeedFamily& family,
                               const std::vector<double>& delta_grid,
                               const AppendixOptions& options = {});

struct DyadicSumOptions {
  Interval domain{0.0, 1.0};
  CoverOptions cover;
  /// Smoothness proxy used for the analytic condition.
  double alpha_proxy = 1e9;
};

struct DyadicSumReport {
  std::vector<int> ks;
  std::vector<std::size_t> counts;
  std::vector<bool> gap;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  /// Sum of the last third of the terms over the sum of the third before it.
  double tail_ratio = 0.0;
  bool numeric_converges = false;  ///< tail_ratio < 0.95
  bool numeric_diverges = false;   ///< tail_ratio >= 1
  double lhs = 0.0;                ///< 2/(n^2+n) + eps
  double rhs = 0.0;                ///< q/p' + 1/(alpha_proxy - n)
  bool analytic_holds = false;
  bool limiting_holds = false;     ///< alpha_proxy -> infinity
};

/// Partial sums of N_k 2^(-k (2/(n^2+n) + eps)) 2^(k q / p') for k in [k_lo, k_hi].
DyadicSumReport dyadic_restriction_sum(const SmoothFn& phi_n, const ExponentPair& pair,
                                       int k_lo, int k_hi,
                                       const DyadicSumOptions& options = {});

/// Tail ratio of a term sequence, as used by dyadic_restriction_sum.
double block_tail_ratio(const std::vector<double>& terms);

}  // namespace oscurve
