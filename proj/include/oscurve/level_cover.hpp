#pragma once

#include <oscurve/curve.hpp>
#include <oscurve/smooth_fn.hpp>

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace oscurve {

/// A maximal component of {r/4 < |phi| < 2r} that meets E_r = {r/2 <= |phi| <= r}.
struct LevelInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;
  int sign = 1;
  double witness = 0.0;  ///< a point of E_r inside the interval
  /// The band transit happened between two samples closer than the
  /// crossing tolerance; lo == hi is the located transit point.
  bool inferred = false;
};

struct LevelCover {
  double r = 1.0;
  std::vector<LevelInterval> intervals;

  std::size_t count() const { return intervals.size(); }
  std::size_t inferred_count() const;
};

struct CoverOptions {
  /// Largest spacing between consecutive samples; 0 means width / 1000.
  double resolution = 0.0;
  /// Fraction of a local half period (or Taylor scale) per step.
  double step_factor = 0.125;
  /// Crossing bisection stops at this width relative to the domain.
  double crossing_rel_width = 1e-13;
  std::size_t max_evaluations = 200'000'000;
  /// When false, an unresolvable band jump raises ResolutionError.
  bool allow_inferred = true;
};

LevelCover build_cover(const SmoothFn& phi, Interval domain, double r,
                       const CoverOptions& options = {});

/// build_cover with r = 2^-k.
LevelCover dyadic_cover(const SmoothFn& phi, Interval domain, int k,
                        const CoverOptions& options = {});

/// Largest |phi| over a uniform grid with the given number of points.
double sampled_sup(const SmoothFn& phi, Interval domain, std::size_t samples);

/// ceil(-log2 sup|phi|) - 1 using sampled_sup.
int dyadic_start_level(const SmoothFn& phi, Interval domain,
                       std::size_t samples = 100'001);

struct VariationReport {
  bool applicable = false;
  std::size_t n = 0;        ///< N(r; psi), psi = phi rescaled to [0, 1]
  std::size_t n_prime = 0;  ///< N(N r / 8; psi')
  double r_prime = 0.0;
  std::size_t raw_n = 0;        ///< N(r; phi) on the original domain
  std::size_t raw_n_prime = 0;  ///< N(N r / 8; phi') on the original domain
  bool holds = false;       ///< n_prime >= n / 16 (true when inapplicable)
  std::string note;
};

VariationReport verify_first_variation(const SmoothFnPtr& phi, Interval domain,
                                       double r,
                                       const CoverOptions& options = {});

struct GrowthReport {
  std::vector<int> ks;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> inferred;
  std::vector<bool> gap;  ///< level failed with a resolution diagnostic
  std::vector<std::string> diagnostics;
  double slope = 0.0;     ///< least-squares slope of log2 max(N_k, 1) on k
};

GrowthReport growth_exponent(const SmoothFn& phi, Interval domain, int k_lo,
                             int k_hi, const CoverOptions& options = {});

/// Rows "k,j,lo,hi,sign,witness" for every interval, then "k,N" summary.
void write_cover_csv(std::ostream& out, int k, const LevelCover& cover);

}  // namespace oscurve
