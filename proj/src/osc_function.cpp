#include <oscurve/errors.hpp>
#include <oscurve/osc_function.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace oscurve {
namespace {

constexpr double kDropRatio = 1e-300;
constexpr double kMergeTol = 1e-12;

// Preferred representative when two triples have the same value.
bool preferred(const ExponentTriple& x, const ExponentTriple& y) {
  if (x.b != y.b) return x.b > y.b;
  if (x.c != y.c) return x.c > y.c;
  return x.a < y.a;
}

bool same_value(double x, double y) {
  return std::abs(x - y) <= kMergeTol * std::max(1.0, std::abs(x));
}

}  // namespace

FracPoly::FracPoly(std::vector<Term> terms, double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
  std::erase_if(terms, [](const Term& t) { return t.coeff == 0.0; });
  for (const auto& t : terms) {
    if (t.exponent.a < 0 || t.exponent.b < 0 || t.exponent.c < 0) {
      throw PreconditionError("osc_symbolic::FracPoly",
                              "exponent triples must be nonnegative");
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [&](const Term& x, const Term& y) {
    const double vx = x.exponent.value(alpha, beta);
    const double vy = y.exponent.value(alpha, beta);
    if (vx != vy) return vx > vy;
    return x.exponent < y.exponent;
  });

  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size();) {
    const double v0 = terms[i].exponent.value(alpha, beta);
    Term acc{0.0, terms[i].exponent};
    std::size_t j = i;
    for (; j < terms.size() &&
           same_value(terms[j].exponent.value(alpha, beta), v0);
         ++j) {
      acc.coeff += terms[j].coeff;
      if (preferred(terms[j].exponent, acc.exponent)) {
        acc.exponent = terms[j].exponent;
      }
    }
    if (acc.coeff != 0.0) merged.push_back(acc);
    i = j;
  }

  double largest = 0.0;
  for (const auto& t : merged) largest = std::max(largest, std::abs(t.coeff));
  std::erase_if(merged, [&](const Term& t) {
    return std::abs(t.coeff) < kDropRatio * largest;
  });
  terms_ = std::move(merged);
}

double FracPoly::degree() const {
  if (terms_.empty()) return -std::numeric_limits<double>::infinity();
  return terms_.front().exponent.value(alpha_, beta_);
}

std::optional<ExponentTriple> FracPoly::leading() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.front().exponent;
}

double FracPoly::evaluate(double t) const {
  double sum = 0.0;
  for (const auto& term : terms_) {
    sum += term.coeff * std::pow(t, -term.exponent.value(alpha_, beta_));
  }
  return sum;
}

FracPoly FracPoly::operator+(const FracPoly& rhs) const {
  if (alpha_ != rhs.alpha_ || beta_ != rhs.beta_) {
    throw PreconditionError("osc_symbolic::FracPoly",
                            "adding polynomials over different (alpha, beta)");
  }
  std::vector<Term> all(terms_.begin(), terms_.end());
  all.insert(all.end(), rhs.terms_.begin(), rhs.terms_.end());
  return FracPoly(std::move(all), alpha_, beta_);
}

OscFunction::OscFunction(FracPoly sin_part, FracPoly cos_part)
    : sin_part_(std::move(sin_part)), cos_part_(std::move(cos_part)) {
  if (!(alpha() > 0.0) || !(beta() > 0.0)) {
    throw PreconditionError("osc_symbolic::OscFunction",
                            "alpha and beta must be positive");
  }
  if (sin_part_.alpha() != cos_part_.alpha() ||
      sin_part_.beta() != cos_part_.beta()) {
    throw PreconditionError("osc_symbolic::OscFunction",
                            "sin and cos parts disagree on (alpha, beta)");
  }
  compile();
}

OscFunction::OscFunction(double alpha, double beta, std::vector<Term> sin_terms,
                         std::vector<Term> cos_terms)
    : OscFunction(FracPoly(std::move(sin_terms), alpha, beta),
                  FracPoly(std::move(cos_terms), alpha, beta)) {}

OscFunction OscFunction::seed(double alpha, double beta) {
  return OscFunction(alpha, beta, {Term{1.0, {}}}, {});
}

void OscFunction::compile() {
  compiled_.clear();
  const auto add = [&](const FracPoly& p, bool is_sin) {
    for (const auto& term : p.terms()) {
      compiled_.push_back({std::log(std::abs(term.coeff)),
                           term.exponent.value(alpha(), beta()),
                           term.coeff < 0.0, is_sin});
    }
  };
  add(sin_part_, true);
  add(cos_part_, false);
}

double OscFunction::degree() const {
  return std::max(sin_part_.degree(), cos_part_.degree());
}

std::optional<ExponentTriple> OscFunction::leading_exponent() const {
  const auto p = sin_part_.leading();
  const auto q = cos_part_.leading();
  if (!p) return q;
  if (!q) return p;
  const double vp = p->value(alpha(), beta());
  const double vq = q->value(alpha(), beta());
  if (same_value(vp, vq)) return preferred(*p, *q) ? p : q;
  return vp > vq ? p : q;
}

ScaledValue OscFunction::core(double t) const {
  if (!(t > 0.0)) throw DomainError("osc_symbolic::evaluate", "t must be > 0");
  ScaledValue out;
  if (compiled_.empty()) return out;
  const double lt = std::log(t);
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& c : compiled_) lmax = std::max(lmax, c.log_coeff - c.exponent * lt);
  const double phase = std::pow(t, -beta());
  const double s = std::sin(phase);
  const double co = std::cos(phase);
  for (const auto& c : compiled_) {
    const double w = std::exp(c.log_coeff - c.exponent * lt - lmax);
    const double trig = c.is_sin ? s : co;
    out.value += (c.negative ? -w : w) * trig;
    out.magnitude += w;
  }
  out.log_scale = lmax;
  return out;
}

double OscFunction::log_envelope(double t) const {
  if (!(t > 0.0)) throw DomainError("osc_symbolic::log_envelope", "t must be > 0");
  if (compiled_.empty()) return -std::numeric_limits<double>::infinity();
  const double lt = std::log(t);
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& c : compiled_) lmax = std::max(lmax, c.log_coeff - c.exponent * lt);
  double sum = 0.0;
  for (const auto& c : compiled_) sum += std::exp(c.log_coeff - c.exponent * lt - lmax);
  return lmax + std::log(sum) - std::pow(t, -alpha());
}

OscFunction OscFunction::operator+(const OscFunction& rhs) const {
  return OscFunction(sin_part_ + rhs.sin_part_, cos_part_ + rhs.cos_part_);
}

OscFunction differentiate(const OscFunction& f) {
  const double alpha = f.alpha();
  const double beta = f.beta();
  constexpr ExponentTriple kOne{0, 0, 1};
  constexpr ExponentTriple kAlpha{1, 0, 1};
  constexpr ExponentTriple kBeta{0, 1, 1};

  std::vector<Term> sin_terms;
  std::vector<Term> cos_terms;
  // d/dt [c t^-e exp(-t^-a) sin(t^-b)] =
  //   exp(-t^-a) [(-c e t^-(e+1) + c a t^-(e+a+1)) sin - c b t^-(e+b+1) cos]
  for (const auto& term : f.sin_part().terms()) {
    const double e = term.exponent.value(alpha, beta);
    sin_terms.push_back({-term.coeff * e, term.exponent + kOne});
    sin_terms.push_back({term.coeff * alpha, term.exponent + kAlpha});
    cos_terms.push_back({-term.coeff * beta, term.exponent + kBeta});
  }
  for (const auto& term : f.cos_part().terms()) {
    const double e = term.exponent.value(alpha, beta);
    cos_terms.push_back({-term.coeff * e, term.exponent + kOne});
    cos_terms.push_back({term.coeff * alpha, term.exponent + kAlpha});
    sin_terms.push_back({term.coeff * beta, term.exponent + kBeta});
  }
  return OscFunction(alpha, beta, std::move(sin_terms), std::move(cos_terms));
}

OscFunction nth_derivative(const OscFunction& f, int n) {
  if (n < 0) {
    throw PreconditionError("osc_symbolic::nth_derivative", "n must be >= 0");
  }
  OscFunction out = f;
  for (int i = 0; i < n; ++i) out = differentiate(out);
  return out;
}

ExtendedReal evaluate(const OscFunction& f, double t) {
  const ScaledValue c = f.core(t);
  if (c.value == 0.0) return {};
  return ExtendedReal(c.value) * ExtendedReal::exp(c.log_scale) *
         ExtendedReal::exp(-std::pow(t, -f.alpha()));
}

AmplitudePhase amplitude_phase(const OscFunction& f, double u) {
  if (!(u > 0.0)) {
    throw DomainError("osc_symbolic::amplitude_phase", "u must be > 0");
  }
  const double deg = f.degree();
  if (!std::isfinite(deg)) {
    throw DegenerateError("osc_symbolic::amplitude_phase", "zero function");
  }
  const double lu = std::log(u);
  const auto normalized = [&](const FracPoly& p) {
    double sum = 0.0;
    for (const auto& term : p.terms()) {
      const double e = term.exponent.value(f.alpha(), f.beta());
      sum += term.coeff * std::exp((e - deg) / f.beta() * lu);
    }
    return sum;
  };
  const double p0 = normalized(f.sin_part());
  const double q0 = normalized(f.cos_part());
  const double amp = std::hypot(p0, q0);
  if (amp == 0.0) {
    throw DegenerateError("osc_symbolic::amplitude_phase", "amplitude vanishes");
  }
  // p0 sin u + q0 cos u = amp cos(u + theta): amp cos theta = q0,
  // amp sin theta = -p0.
  double theta = std::atan2(-p0, q0);
  if (theta <= -std::numbers::pi) theta = std::numbers::pi;
  return {amp, theta};
}

namespace {

int core_sign(const OscFunction& f, double t) {
  const ScaledValue c = f.core(t);
  // Treat rounding-level values (e.g. sin(pi)) as exact zeros.
  if (std::abs(c.value) <= 1e-13 * c.magnitude) return 0;
  return c.value > 0.0 ? 1 : -1;
}

// Illinois false position with periodic bisection; keeps a sign bracket.
double refine_node(const OscFunction& f, double lo, double hi, double tol) {
  const auto g = [&](double t) { return f.core(t).value; };
  double fl = g(lo);
  double fh = g(hi);
  int side = 0;
  double last_width = hi - lo;
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    double mid;
    if (iter % 3 == 2 && hi - lo > 0.5 * last_width) {
      mid = 0.5 * (lo + hi);
    } else {
      mid = (lo * fh - hi * fl) / (fh - fl);
      if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    }
    if (iter % 3 == 2) last_width = hi - lo;
    if (mid <= lo || mid >= hi) break;
    const double fm = g(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fh > 0.0)) {
      hi = mid;
      fh = fm;
      if (side == -1) fl *= 0.5;
      side = -1;
    } else {
      lo = mid;
      fl = fm;
      if (side == 1) fh *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> oscillation_nodes(const OscFunction& f, double a, double b,
                                      const NodeOptions& options) {
  static const std::string kOp = "osc_symbolic::oscillation_nodes";
  if (!(a > 0.0) || !(b > a)) {
    throw DomainError(kOp, "need 0 < a < b");
  }
  std::vector<double> nodes;
  if (f.is_zero()) return nodes;
  const double beta = f.beta();
  const double step_factor = std::numbers::pi / options.samples_per_half_period / beta;
  const double max_step = (b - a) / 64.0;

  const auto push = [&](double t) {
    if (nodes.size() >= options.max_nodes) {
      throw ResolutionError(kOp, "node count exceeds cap " +
                                     std::to_string(options.max_nodes),
                            a, b);
    }
    nodes.push_back(t);
  };

  double prev_t = a;
  int prev_s = core_sign(f, a);
  if (prev_s == 0) push(a);
  double t = a;
  while (t < b) {
    const double step = std::min(max_step, step_factor * std::pow(t, beta + 1.0));
    double next = t + step;
    if (next >= b || b - next < 1e-3 * step) next = b;
    const int s = core_sign(f, next);
    if (s == 0) {
      push(next);
    } else if (prev_s != 0 && s != prev_s) {
      push(refine_node(f, prev_t, next, options.rel_width * prev_t));
    }
    prev_t = next;
    prev_s = s;
    t = next;
  }
  return nodes;
}

std::string to_term_list(const OscFunction& f) {
  std::ostringstream os;
  os.precision(17);
  const auto emit = [&](const FracPoly& p, const char* part) {
    for (const auto& term : p.terms()) {
      os << (term.coeff < 0 ? '-' : '+') << ' ' << std::abs(term.coeff) << ' '
         << term.exponent.a << ' ' << term.exponent.b << ' ' << term.exponent.c
         << ' ' << part << '\n';
    }
  };
  emit(f.sin_part(), "sin");
  emit(f.cos_part(), "cos");
  return os.str();
}

OscFunction parse_term_list(std::string_view text, double alpha, double beta) {
  std::vector<Term> sin_terms;
  std::vector<Term> cos_terms;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string sign, part;
    double mag = 0.0;
    Term term;
    if (!(ls >> sign >> mag >> term.exponent.a >> term.exponent.b >>
          term.exponent.c >> part) ||
        (sign != "+" && sign != "-") || (part != "sin" && part != "cos")) {
      throw PreconditionError("osc_symbolic::parse_term_list",
                              "malformed term on line " + std::to_string(line_no));
    }
    term.coeff = sign == "-" ? -mag : mag;
    (part == "sin" ? sin_terms : cos_terms).push_back(term);
  }
  return OscFunction(alpha, beta, std::move(sin_terms), std::move(cos_terms));
}

}  // namespace oscurve
