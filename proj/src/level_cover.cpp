#include <oscurve/level_cover.hpp>

#include <oscurve/errors.hpp>
#include <oscurve/fit.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oscurve {

std::size_t LevelCover::inferred_count() const {
  return static_cast<std::size_t>(
      std::count_if(intervals.begin(), intervals.end(),
                    [](const LevelInterval& i) { return i.inferred; }));
}

namespace {

constexpr const char* kOp = "level_set_cover::build_cover";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Band { Low, Mid, High };

struct Sample {
  double t = 0.0;
  double f = 0.0;
  Band band = Band::Low;
  int sign = 1;

  double mag() const { return std::abs(f); }
  bool is_mid() const { return band == Band::Mid; }
};

class CoverBuilder {
 public:
  CoverBuilder(const SmoothFn& phi, Interval domain, double r,
               const CoverOptions& options)
      : phi_(phi), dom_(domain), r_(r), opt_(options) {
    res_ = opt_.resolution > 0.0 ? opt_.resolution : dom_.width() / 1000.0;
    min_w_ = opt_.crossing_rel_width * dom_.width();
    floor_h_ = 64.0 * min_w_;
    cover_.r = r;
  }

  LevelCover run() {
    Sample prev = sample(dom_.lo);
    if (prev.is_mid()) {
      open_run(dom_.lo, true, prev.sign);
      observe_first(prev, dom_.lo);
    }
    while (prev.t < dom_.hi) {
      double tn = prev.t + propose_step(prev);
      if (tn >= dom_.hi || dom_.hi - tn < 0.5 * floor_h_) tn = dom_.hi;
      const Sample q = sample(tn);
      process_pair(prev, q);
      prev = q;
    }
    if (in_run_) close_run(dom_.hi, true);
    return std::move(cover_);
  }

 private:
  Sample sample(double t) {
    if (++evaluations_ > opt_.max_evaluations) {
      throw ResolutionError(kOp, "evaluation budget exhausted", dom_.lo, t);
    }
    Sample s;
    s.t = t;
    s.f = phi_(t);
    if (!std::isfinite(s.f)) {
      throw DomainError(kOp, "non-finite function value at t = " + std::to_string(t));
    }
    s.sign = s.f < 0.0 ? -1 : 1;
    const double a = std::abs(s.f);
    if (a <= 0.25 * r_) {
      s.band = Band::Low;
    } else if (a >= 2.0 * r_) {
      s.band = Band::High;
    } else {
      s.band = Band::Mid;
    }
    return s;
  }

  double propose_step(const Sample& s) {
    double h = std::min(res_, dom_.hi - s.t);
    const auto freq = phi_.frequency_hint(s.t);
    double h_local = h;
    if (freq && *freq > 0.0) {
      h_local = opt_.step_factor * std::numbers::pi / *freq;
    } else if (phi_.max_order() >= 1) {
      const double scale = std::max(s.mag(), 0.25 * r_);
      const double d1 = std::abs(phi_.deriv(1, s.t));
      if (d1 > 0.0) h_local = std::min(h_local, opt_.step_factor * scale / d1);
      if (phi_.max_order() >= 2) {
        const double d2 = std::abs(phi_.deriv(2, s.t));
        if (d2 > 0.0) {
          h_local = std::min(h_local, opt_.step_factor * std::sqrt(scale / d2));
        }
      }
    }
    if (h_local < h && s.band == Band::Low) {
      // Skip stretches where the function provably stays below r/4.
      for (double trial = h; trial > h_local; trial *= 0.5) {
        const auto env = phi_.envelope_bound(s.t, s.t + trial);
        if (!env) break;
        if (*env < 0.25 * r_) return trial;
      }
    }
    return std::max(std::min(h, h_local), floor_h_);
  }

  static bool compatible(const Sample& p, const Sample& q) {
    if (p.band == q.band) return p.band == Band::Low || p.sign == q.sign;
    if (p.band == Band::High || q.band == Band::High) {
      const Sample& other = p.band == Band::High ? q : p;
      const Sample& high = p.band == Band::High ? p : q;
      return other.band == Band::Mid && other.sign == high.sign;
    }
    return true;  // Low next to Mid
  }

  void process_pair(const Sample& p, const Sample& q) {
    if (compatible(p, q)) {
      transition(p, q);
      return;
    }
    if (q.t - p.t <= min_w_) {
      unresolved(p, q);
      return;
    }
    const Sample m = sample(0.5 * (p.t + q.t));
    process_pair(p, m);
    process_pair(m, q);
  }

  void transition(const Sample& p, const Sample& q) {
    if (p.is_mid() && q.is_mid()) {
      observe(p, q);
    } else if (p.is_mid()) {
      const Sample inner = crossing(p, q);
      if (inner.t != p.t) observe(p, inner);
      close_run(inner.t, false);
    } else if (q.is_mid()) {
      const Sample inner = crossing(q, p);
      open_run(inner.t, false, q.sign);
      observe_first(inner, inner.t);
      if (inner.t != q.t) observe(inner, q);
    }
  }

  // Band jump that survives refinement down to the crossing tolerance.
  void unresolved(const Sample& p, const Sample& q) {
    const bool needs_inferred =
        p.band == Band::High || q.band == Band::High;
    if (needs_inferred && !opt_.allow_inferred) {
      throw ResolutionError(kOp, "band jump between adjacent samples survives refinement",
                            p.t, q.t);
    }
    const double w = q.t - p.t;
    if (p.is_mid()) close_run(p.t, false);
    if (p.band == Band::High && q.band == Band::High) {
      emit_inferred(p.t + w / 3.0, p.sign);
      emit_inferred(p.t + 2.0 * w / 3.0, q.sign);
    } else if (p.band == Band::High) {
      emit_inferred(0.5 * (p.t + q.t), p.sign);
    } else if (q.band == Band::High) {
      emit_inferred(0.5 * (p.t + q.t), q.sign);
    }
    if (q.is_mid()) {
      open_run(q.t, false, q.sign);
      observe_first(q, q.t);
    }
  }

  // Bisect between a Mid sample and a non-Mid sample; the Mid end is kept.
  Sample crossing(Sample inner, Sample outer) {
    const int sign = inner.sign;
    while (std::abs(outer.t - inner.t) > min_w_) {
      const double m = 0.5 * (inner.t + outer.t);
      if (m == inner.t || m == outer.t) break;
      const Sample s = sample(m);
      if (s.is_mid() && s.sign == sign) {
        inner = s;
      } else {
        outer = s;
      }
    }
    return inner;
  }

  bool in_e(double mag) const { return mag >= 0.5 * r_ && mag <= r_; }

  // Locate a point of E_r between a point below r/2 and one above r.
  double find_in_band(double t_low, double t_high) {
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (t_low + t_high);
      const double a = std::abs(phi_(m));
      ++evaluations_;
      if (in_e(a) || m == t_low || m == t_high) return m;
      if (a < 0.5 * r_) {
        t_low = m;
      } else {
        t_high = m;
      }
    }
    return 0.5 * (t_low + t_high);
  }

  void open_run(double lo, bool closed, int sign) {
    in_run_ = true;
    run_lo_ = lo;
    run_lo_closed_ = closed;
    run_sign_ = sign;
    has_e_ = false;
    witness_ = kNaN;
  }

  void observe_first(const Sample& s, double prev_t) {
    max_ = {s.t, s.mag(), prev_t, kNaN};
    min_ = max_;
    if (in_e(s.mag())) set_witness(s.t);
  }

  void observe(const Sample& p, const Sample& q) {
    if (!has_e_) {
      if (in_e(q.mag())) {
        set_witness(q.t);
      } else if (p.mag() < 0.5 * r_ && q.mag() > r_) {
        set_witness(find_in_band(p.t, q.t));
      } else if (p.mag() > r_ && q.mag() < 0.5 * r_) {
        set_witness(find_in_band(q.t, p.t));
      }
    }
    for (Extreme* e : {&max_, &min_}) {
      if (std::isnan(e->next)) e->next = q.t;
    }
    if (q.mag() > max_.value) max_ = {q.t, q.mag(), p.t, kNaN};
    if (q.mag() < min_.value) min_ = {q.t, q.mag(), p.t, kNaN};
  }

  void set_witness(double t) {
    has_e_ = true;
    witness_ = t;
  }

  // Golden-section search for an extreme of |phi| on [a, b].
  std::pair<double, double> golden(double a, double b, bool maximize) {
    constexpr double g = 0.6180339887498949;
    const auto score = [&](double t) {
      ++evaluations_;
      const double v = std::abs(phi_(t));
      return maximize ? v : -v;
    };
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = score(x1), f2 = score(x2);
    for (int it = 0; it < 80 && b - a > min_w_; ++it) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = score(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = score(x2);
      }
    }
    const double t = f1 > f2 ? x1 : x2;
    return {t, std::abs(f1 > f2 ? f1 : f2)};
  }

  void refine_extremes(double hi) {
    if (max_.value < 0.5 * r_) {
      const double b = std::isnan(max_.next) ? hi : max_.next;
      const auto [t, v] = golden(std::min(max_.prev, max_.t), b, true);
      if (v >= 0.5 * r_) set_witness(in_e(v) ? t : find_in_band(max_.t, t));
    } else if (min_.value > r_) {
      const double b = std::isnan(min_.next) ? hi : min_.next;
      const auto [t, v] = golden(std::min(min_.prev, min_.t), b, false);
      if (v <= r_) set_witness(in_e(v) ? t : find_in_band(t, min_.t));
    }
  }

  void close_run(double hi, bool closed) {
    in_run_ = false;
    if (!has_e_) refine_extremes(hi);
    if (!has_e_) return;
    LevelInterval iv;
    iv.lo = run_lo_;
    iv.hi = hi;
    iv.lo_closed = run_lo_closed_;
    iv.hi_closed = closed;
    iv.sign = run_sign_;
    iv.witness = std::clamp(witness_, run_lo_, hi);
    cover_.intervals.push_back(iv);
  }

  void emit_inferred(double t, int sign) {
    LevelInterval iv;
    iv.lo = iv.hi = iv.witness = t;
    iv.sign = sign;
    iv.inferred = true;
    cover_.intervals.push_back(iv);
  }

  struct Extreme {
    double t = 0.0;
    double value = 0.0;
    double prev = 0.0;
    double next = kNaN;
  };

  const SmoothFn& phi_;
  Interval dom_;
  double r_;
  CoverOptions opt_;
  double res_ = 0.0;
  double min_w_ = 0.0;
  double floor_h_ = 0.0;
  std::size_t evaluations_ = 0;
  LevelCover cover_;

  bool in_run_ = false;
  double run_lo_ = 0.0;
  bool run_lo_closed_ = false;
  int run_sign_ = 1;
  bool has_e_ = false;
  double witness_ = kNaN;
  Extreme max_;
  Extreme min_;
};

}  // namespace

LevelCover build_cover(const SmoothFn& phi, Interval domain, double r,
                       const CoverOptions& options) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw PreconditionError(kOp, "r must be positive and finite");
  }
  if (!(domain.hi > domain.lo)) {
    throw PreconditionError(kOp, "domain must satisfy a < b");
  }
  if (!(options.step_factor > 0.0) || !(options.crossing_rel_width > 0.0) ||
      options.resolution < 0.0) {
    throw PreconditionError(kOp, "invalid sampling options");
  }
  return CoverBuilder(phi, domain, r, options).run();
}

LevelCover dyadic_cover(const SmoothFn& phi, Interval domain, int k,
                        const CoverOptions& options) {
  return build_cover(phi, domain, std::ldexp(1.0, -k), options);
}

double sampled_sup(const SmoothFn& phi, Interval domain, std::size_t samples) {
  if (samples < 2) samples = 2;
  double sup = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = domain.lo + domain.width() * static_cast<double>(i) /
                                     static_cast<double>(samples - 1);
    sup = std::max(sup, std::abs(phi(t)));
  }
  return sup;
}

int dyadic_start_level(const SmoothFn& phi, Interval domain, std::size_t samples) {
  const double sup = sampled_sup(phi, domain, samples);
  if (!(sup > 0.0)) {
    throw DegenerateError("level_set_cover::dyadic_start_level",
                          "function vanishes on every sample");
  }
  return static_cast<int>(std::ceil(-std::log2(sup))) - 1;
}

VariationReport verify_first_variation(const SmoothFnPtr& phi, Interval domain,
                                       double r, const CoverOptions& options) {
  if (phi->max_order() < 1) {
    throw PreconditionError("level_set_cover::verify_first_variation",
                            "a first derivative is required");
  }
  const double w = domain.width();
  const auto psi = std::make_shared<AffineFn>(phi, domain.lo, w);
  const auto dpsi = std::make_shared<AffineFn>(phi, domain.lo, w, w, 1);
  CoverOptions unit = options;
  if (unit.resolution > 0.0) unit.resolution /= w;

  VariationReport report;
  report.n = build_cover(*psi, {0.0, 1.0}, r, unit).count();
  report.raw_n = build_cover(*phi, domain, r, options).count();
  if (report.n < 20) {
    report.applicable = false;
    report.holds = true;
    report.note = "inapplicable: N(r) = " + std::to_string(report.n) + " < 20";
    return report;
  }
  report.applicable = true;
  report.r_prime = static_cast<double>(report.n) * r / 8.0;
  report.n_prime = build_cover(*dpsi, {0.0, 1.0}, report.r_prime, unit).count();
  report.raw_n_prime =
      build_cover(*derivative_of(phi), domain, report.r_prime, options).count();
  report.holds = 16 * report.n_prime >= report.n;
  return report;
}

GrowthReport growth_exponent(const SmoothFn& phi, Interval domain, int k_lo,
                             int k_hi, const CoverOptions& options) {
  if (k_hi < k_lo) {
    throw PreconditionError("level_set_cover::growth_exponent", "empty k range");
  }
  GrowthReport report;
  std::vector<double> xs, ys;
  for (int k = k_lo; k <= k_hi; ++k) {
    report.ks.push_back(k);
    try {
      const LevelCover cover = dyadic_cover(phi, domain, k, options);
      report.counts.push_back(cover.count());
      report.inferred.push_back(cover.inferred_count());
      report.gap.push_back(false);
      report.diagnostics.emplace_back();
      xs.push_back(k);
      ys.push_back(std::log2(std::max<double>(1.0, static_cast<double>(cover.count()))));
    } catch (const ResolutionError& e) {
      report.counts.push_back(0);
      report.inferred.push_back(0);
      report.gap.push_back(true);
      report.diagnostics.emplace_back(e.what());
    }
  }
  report.slope = linear_fit(xs, ys).slope;
  return report;
}

void write_cover_csv(std::ostream& out, int k, const LevelCover& cover) {
  out << "k,j,lo,hi,sign,witness\n";
  out.precision(17);
  for (std::size_t j = 0; j < cover.intervals.size(); ++j) {
    const auto& iv = cover.intervals[j];
    out << k << ',' << j << ',' << iv.lo << ',' << iv.hi << ',' << iv.sign << ','
        << iv.witness << '\n';
  }
  out << "k,N\n" << k << ',' << cover.count() << '\n';
}

}  // namespace oscurve
