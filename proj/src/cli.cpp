#include <oscurve/cli.hpp>

#include <oscurve/csv.hpp>
#include <oscurve/curve.hpp>
#include <oscurve/errors.hpp>
#include <oscurve/experiments.hpp>
#include <oscurve/level_cover.hpp>
#include <oscurve/osc_function.hpp>
#include <oscurve/smooth_fn.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace oscurve::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"derive",    "torsion",   "cover",
                                            "variation", "knapp",     "sharpness",
                                            "dyadic-sum", "jacobian"};

const std::vector<std::string> kKeys = {
    "n",     "alpha",     "beta",       "rho",   "eps",    "p",       "q",
    "delta-grid", "k-range", "resolution", "seed", "phi", "k", "r",
    "domain", "order", "samples", "alpha-proxy"};

struct HelpRequested {
  std::string text;
};

/// Parameters each command accepts and their defaults ("" = optional, no default).
const std::vector<std::pair<std::string, std::string>>& command_params(
    const std::string& command) {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> table = {
      {"derive", {{"n", "3"}, {"alpha", "1"}, {"beta", "2"}}},
      {"torsion",
       {{"n", "3"}, {"alpha", "1"}, {"beta", "2"}, {"phi", "seed"},
        {"domain", "0.2,1"}, {"samples", "100"}, {"seed", "1"}}},
      {"cover",
       {{"phi", "sin:1"}, {"alpha", "1"}, {"beta", "2"}, {"order", "0"},
        {"k", ""}, {"r", ""}, {"domain", "0,1"}, {"resolution", "0"}}},
      {"variation",
       {{"phi", "sin:20"}, {"alpha", "1"}, {"beta", "2"}, {"r", "1"},
        {"domain", "0,1"}, {"resolution", "0"}}},
      {"knapp",
       {{"n", "3"}, {"alpha", "1"}, {"beta", "2"}, {"p", "1.05"},
        {"delta-grid", "0.05,0.1,0.2"}, {"samples", "1000"}, {"seed", "1"}}},
      {"sharpness",
       {{"n", "3"}, {"alpha", "1"}, {"beta", "3"}, {"rho", ""},
        {"delta-grid", "geom:0.03:0.3:12"}}},
      {"dyadic-sum",
       {{"n", "3"}, {"alpha", "1"}, {"beta", "2"}, {"p", "1.05"}, {"q", ""},
        {"eps", "0"}, {"k-range", "auto:40"}, {"alpha-proxy", "1e9"},
        {"domain", "0,1"}, {"resolution", "0"}}},
      {"jacobian",
       {{"n", "3"}, {"phi", "sine-torsion"}, {"alpha", "1"}, {"beta", "2"},
        {"domain", "0,1"}, {"samples", "10000"}, {"seed", "1"}}},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw UsageError("unknown command '" + command + "'");
  return it->second;
}

std::string topic(const std::string& command) {
  static const std::map<std::string, std::string> tags = {
      {"derive", "oscillatory-derivatives"}, {"torsion", "curve-torsion"},
      {"cover", "level-set-cover"},          {"variation", "first-variation"},
      {"knapp", "knapp-example"},            {"sharpness", "sharpness"},
      {"dyadic-sum", "dyadic-decomposition"}, {"jacobian", "offspring-jacobian"}};
  return tags.at(command);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) {
    throw UsageError("parameter '" + key + "' expects a real number, got '" + text + "'");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw UsageError("parameter '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

class Params {
 public:
  explicit Params(std::vector<std::pair<std::string, std::string>> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return !raw(key).empty(); }

  const std::string& raw(const std::string& key) const {
    for (const auto& [k, v] : kv_) {
      if (k == key) return v;
    }
    throw UsageError("internal: parameter '" + key + "' not declared");
  }

  double real(const std::string& key) const { return to_real(key, raw(key)); }
  long long integer(const std::string& key) const { return to_integer(key, raw(key)); }

  int dimension() const {
    const long long n = integer("n");
    if (n < 2 || n > 12) throw UsageError("parameter 'n' must lie in [2, 12]");
    return static_cast<int>(n);
  }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw UsageError("parameter '" + key + "' must be positive");
    return v;
  }

  Interval domain() const {
    const auto parts = split(raw("domain"), ',');
    if (parts.size() != 2) throw UsageError("parameter 'domain' expects 'a,b'");
    const Interval d{to_real("domain", parts[0]), to_real("domain", parts[1])};
    if (!(d.hi > d.lo)) throw UsageError("parameter 'domain' requires a < b");
    return d;
  }

  std::vector<double> grid(const std::string& key) const {
    const std::string& s = raw(key);
    std::vector<double> out;
    if (s.rfind("geom:", 0) == 0) {
      const auto parts = split(std::string_view(s).substr(5), ':');
      if (parts.size() != 3) throw UsageError("'" + key + "' expects geom:lo:hi:count");
      const double lo = to_real(key, parts[0]);
      const double hi = to_real(key, parts[1]);
      const long long count = to_integer(key, parts[2]);
      if (!(lo > 0.0) || !(hi > lo) || count < 2 || count > 100000) {
        throw UsageError("'" + key + "' geometric grid needs 0 < lo < hi and count >= 2");
      }
      for (long long i = 0; i < count; ++i) {
        out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                                  static_cast<double>(i) /
                                                  static_cast<double>(count - 1)));
      }
      out.front() = lo;
      out.back() = hi;
      return out;
    }
    for (const auto& part : split(s, ',')) out.push_back(to_real(key, part));
    if (out.empty()) throw UsageError("'" + key + "' must not be empty");
    return out;
  }

  const std::vector<std::pair<std::string, std::string>>& all() const { return kv_; }

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
};

SmoothFnPtr make_phi(const Params& P, int n, int order) {
  const std::string& phi_spec = P.raw("phi");
  SmoothFnPtr base;
  if (phi_spec == "seed") {
    const double alpha = P.positive("alpha");
    const double beta = P.positive("beta");
    return std::make_shared<OscFn>(OscFunction::seed(alpha, beta), order, n + 2);
  }
  if (phi_spec.rfind("sin:", 0) == 0) {
    const double m = to_real("phi", phi_spec.substr(4));
    if (!(m > 0.0)) throw UsageError("phi 'sin:<m>' requires m > 0");
    const double w = 2.0 * std::numbers::pi * m;
    base = std::make_shared<CallableFn>(
        [w](int k, double t) {
          return std::pow(w, k) * std::sin(w * t + 0.5 * std::numbers::pi * k);
        },
        16, w);
  } else if (phi_spec.rfind("poly:", 0) == 0) {
    std::vector<double> c;
    for (const auto& part : split(std::string_view(phi_spec).substr(5), ',')) {
      c.push_back(to_real("phi", part));
    }
    base = std::make_shared<PolynomialFn>(c);
  } else if (phi_spec == "sine-torsion") {
    base = sine_torsion_fn(n, 0.75, 0.2);
  } else {
    throw UsageError("unknown phi '" + phi_spec + "' (seed, sin:<m>, poly:c0,c1,..., sine-torsion)");
  }
  if (order > 0) base = derivative_of(base, order);
  return base;
}

std::string extended_string(const ExtendedReal& x) {
  if (x.is_zero()) return "0";
  const double l10 = x.log10_abs();
  const double e = std::floor(l10);
  double m = std::pow(10.0, l10 - e);
  long long ex = static_cast<long long>(e);
  if (m >= 10.0) {
    m /= 10.0;
    ++ex;
  }
  std::string s = x.sign() < 0 ? "-" : "";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.15fe%lld", m, ex);
  return s + buf;
}

json extended_json(const ExtendedReal& x) {
  return json{{"mantissa", x.mantissa()}, {"scale2", x.scale()}, {"log10", x.log10_abs()}};
}

/// A table of formatted cells plus a JSON-typed copy of each row and a summary.
struct Artifact {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json rows_json = json::array();
  json summary = json::object();

  void add(std::vector<std::string> cells, json row) {
    rows.push_back(std::move(cells));
    rows_json.push_back(std::move(row));
  }
};

std::string num(double x) { return format_number(x); }
std::string num(long long x) { return format_number(x); }
std::string num(std::size_t x) { return format_number(static_cast<long long>(x)); }
std::string flag(bool b) { return b ? "1" : "0"; }

Artifact run_derive(const Params& P) {
  const int n = static_cast<int>(P.integer("n"));
  if (n < 0 || n > 40) throw UsageError("parameter 'n' must lie in [0, 40]");
  const double alpha = P.positive("alpha");
  const double beta = P.positive("beta");
  const OscFunction f = nth_derivative(OscFunction::seed(alpha, beta), n);
  Artifact a;
  a.columns = {"part", "coeff", "a", "b", "c", "exponent"};
  const auto emit = [&](const FracPoly& p, const char* part) {
    for (const auto& t : p.terms()) {
      const double v = t.exponent.value(alpha, beta);
      a.add({part, num(t.coeff), num(static_cast<long long>(t.exponent.a)),
             num(static_cast<long long>(t.exponent.b)),
             num(static_cast<long long>(t.exponent.c)), num(v)},
            json{{"part", part}, {"coeff", t.coeff}, {"a", t.exponent.a},
                 {"b", t.exponent.b}, {"c", t.exponent.c}, {"exponent", v}});
    }
  };
  emit(f.sin_part(), "sin");
  emit(f.cos_part(), "cos");
  a.summary["degree"] = f.degree();
  a.summary["expected_degree"] = n * (beta + 1.0);
  if (const auto lead = f.leading_exponent()) {
    a.summary["leading"] = json{{"a", lead->a}, {"b", lead->b}, {"c", lead->c}};
  }
  a.summary["term_count"] = f.sin_part().terms().size() + f.cos_part().terms().size();
  a.summary["term_list"] = to_term_list(f);
  return a;
}

Artifact run_torsion(const Params& P) {
  const int n = P.dimension();
  const Interval dom = P.domain();
  const long long samples = P.integer("samples");
  if (samples < 1 || samples > 10'000'000) throw UsageError("'samples' out of range");
  const SimpleCurve curve(n, make_phi(P, n, 0), dom);
  std::mt19937_64 rng(static_cast<std::uint64_t>(P.integer("seed")));
  std::uniform_real_distribution<double> u(dom.lo, dom.hi);
  const double kn = torsion_constant(n);
  Artifact a;
  a.columns = {"t", "torsion", "expected", "rel_err"};
  double worst = 0.0;
  for (long long i = 0; i < samples; ++i) {
    const double t = u(rng);
    const double tau = torsion(curve, t);
    const double expect = kn * curve.phi().deriv(n, t);
    const double rel = expect != 0.0 ? std::abs(tau - expect) / std::abs(expect)
                                     : std::abs(tau);
    worst = std::max(worst, rel);
    a.add({num(t), num(tau), num(expect), num(rel)},
          json{{"t", t}, {"torsion", tau}, {"expected", expect}, {"rel_err", rel}});
  }
  a.summary["torsion_constant"] = kn;
  a.summary["max_rel_err"] = worst;
  return a;
}

Artifact run_cover(const Params& P) {
  const long long order = P.integer("order");
  if (order < 0 || order > 12) throw UsageError("'order' must lie in [0, 12]");
  double r = 0.0;
  if (P.has("k") && P.has("r")) throw UsageError("give either 'k' or 'r', not both");
  if (P.has("r")) {
    r = P.positive("r");
  } else {
    const long long k = P.has("k") ? P.integer("k") : 0;
    if (k < -1000 || k > 1000) throw UsageError("'k' out of range");
    r = std::ldexp(1.0, -static_cast<int>(k));
  }
  CoverOptions opt;
  opt.resolution = P.real("resolution");
  if (opt.resolution < 0.0) throw UsageError("'resolution' must be >= 0");
  const Interval dom = P.domain();
  const SmoothFnPtr phi = make_phi(P, 3, static_cast<int>(order));
  const LevelCover cover = build_cover(*phi, dom, r, opt);
  const double k = P.has("k") ? static_cast<double>(P.integer("k")) : 0.0 - std::log2(r);
  Artifact a;
  a.columns = {"k", "j", "lo", "hi", "sign", "witness"};
  for (std::size_t j = 0; j < cover.intervals.size(); ++j) {
    const auto& iv = cover.intervals[j];
    a.add({num(k), num(j), num(iv.lo), num(iv.hi), num(static_cast<long long>(iv.sign)),
           num(iv.witness)},
          json{{"k", k}, {"j", j}, {"lo", iv.lo}, {"hi", iv.hi}, {"sign", iv.sign},
               {"witness", iv.witness}, {"lo_closed", iv.lo_closed},
               {"hi_closed", iv.hi_closed}, {"inferred", iv.inferred}});
  }
  a.summary["k"] = k;
  a.summary["r"] = r;
  a.summary["N"] = cover.count();
  a.summary["inferred"] = cover.inferred_count();
  return a;
}

Artifact run_variation(const Params& P) {
  CoverOptions opt;
  opt.resolution = P.real("resolution");
  if (opt.resolution < 0.0) throw UsageError("'resolution' must be >= 0");
  const SmoothFnPtr phi = make_phi(P, 3, 0);
  const VariationReport rep = verify_first_variation(phi, P.domain(), P.positive("r"), opt);
  Artifact a;
  a.columns = {"N", "N_prime", "r_prime", "raw_N", "raw_N_prime", "applicable", "holds"};
  a.add({num(rep.n), num(rep.n_prime), num(rep.r_prime), num(rep.raw_n),
         num(rep.raw_n_prime), flag(rep.applicable), flag(rep.holds)},
        json{{"N", rep.n}, {"N_prime", rep.n_prime}, {"r_prime", rep.r_prime},
             {"raw_N", rep.raw_n}, {"raw_N_prime", rep.raw_n_prime},
             {"applicable", rep.applicable}, {"holds", rep.holds}});
  a.summary["holds"] = rep.holds;
  a.summary["note"] = rep.note;
  return a;
}

Artifact run_knapp(const Params& P) {
  const int n = P.dimension();
  const double alpha = P.positive("alpha");
  const double beta = P.positive("beta");
  const double p = P.real("p");
  if (!(p >= 1.0)) throw UsageError("'p' must be >= 1");
  const long long samples = P.integer("samples");
  if (samples < 1 || samples > 10'000'000) throw UsageError("'samples' out of range");
  const std::vector<double> deltas = P.grid("delta-grid");
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw UsageError("'delta-grid' entries must lie in (0, 1)");
  }
  const OscFunction phi = OscFunction::seed(alpha, beta);
  const ExponentPair pair(p, 1.0, n);
  std::mt19937_64 rng(static_cast<std::uint64_t>(P.integer("seed")));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Artifact a;
  a.columns = {"delta", "samples", "members", "poly_exp", "exp_coeff"};
  bool all = true;
  for (double d : deltas) {
    const KnappProfile prof(n, alpha, d);
    long long members = 0;
    for (long long i = 0; i < samples; ++i) {
      const double t = d * (1.0 - u(rng));
      members += knapp_membership(phi, prof, t) ? 1 : 0;
    }
    all = all && members == samples;
    const KnappExponent e = knapp_rhs_exponent(prof, pair);
    a.add({num(d), num(samples), num(members), num(e.poly_exp), num(e.exp_coeff)},
          json{{"delta", d}, {"samples", samples}, {"members", members},
               {"poly_exp", e.poly_exp}, {"exp_coeff", e.exp_coeff},
               {"p_is_one", e.p_is_one}});
  }
  a.summary["all_members"] = all;
  return a;
}

Artifact run_sharpness(const Params& P) {
  const SeedFamily fam{P.dimension(), P.positive("alpha"), P.positive("beta")};
  if (!(fam.beta > fam.alpha)) throw UsageError("sharpness requires beta > alpha");
  const std::vector<double> grid = P.grid("delta-grid");
  for (double d : grid) {
    if (!(d > 0.0 && d <= 0.3)) throw UsageError("'delta-grid' entries must lie in (0, 0.3]");
  }
  const double rho_default = 2.0 / static_cast<double>(fam.n * (fam.n + 1));
  if (P.has("rho") && std::abs(P.real("rho") - rho_default) > 1e-15) {
    throw UsageError("'rho' must equal 2/(n(n+1)) for the sharpness ratio");
  }
  const SharpnessReport rep = sharpness_test(fam, grid);
  Artifact a;
  a.columns = {"delta", "J", "bound", "ratio", "constant"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ratio = std::exp(rep.log_ratios[i]);
    const double c = appendix_constant(fam, rep.rho, grid[i], rep.j_values[i]);
    a.add({num(grid[i]), extended_string(rep.j_values[i]),
           extended_string(rep.bound_values[i]), num(ratio), num(c)},
          json{{"delta", grid[i]}, {"J", extended_json(rep.j_values[i])},
               {"bound", extended_json(rep.bound_values[i])}, {"ratio", ratio},
               {"constant", c}});
  }
  a.summary["rho"] = rep.rho;
  a.summary["ratio_slope"] = rep.ratio_slope;
  a.summary["predicted_slope"] = rep.predicted_slope;
  a.summary["verdict"] = to_string(rep.verdict);
  a.summary["slope_dead_band"] = 0.1;
  return a;
}

Artifact run_dyadic(const Params& P) {
  const int n = P.dimension();
  const double alpha = P.positive("alpha");
  const double beta = P.positive("beta");
  const double p = P.real("p");
  if (!(p > 1.0)) throw UsageError("'p' must be > 1");
  const double pc = p / (p - 1.0);
  const double q = P.has("q") ? P.real("q") : 2.0 / static_cast<double>(n * n + n) * pc;
  if (!(q >= 1.0)) throw UsageError("'q' must be >= 1");
  const double eps = P.real("eps");
  if (!(eps >= 0.0)) throw UsageError("'eps' must be >= 0");
  const ExponentPair pair(p, q, n, eps);
  DyadicSumOptions opt;
  opt.domain = P.domain();
  opt.cover.resolution = P.real("resolution");
  if (opt.cover.resolution < 0.0) throw UsageError("'resolution' must be >= 0");
  opt.alpha_proxy = P.real("alpha-proxy");
  const OscFn phi_n(OscFunction::seed(alpha, beta), n, 2);

  int k_lo = 0, k_hi = 0;
  const std::string& kr = P.raw("k-range");
  if (kr.rfind("auto", 0) == 0) {
    long long len = 40;
    if (kr.size() > 4) {
      if (kr[4] != ':') throw UsageError("'k-range' expects lo:hi or auto[:length]");
      len = to_integer("k-range", kr.substr(5));
    }
    if (len < 0 || len > 400) throw UsageError("'k-range' length out of range");
    k_lo = dyadic_start_level(phi_n, opt.domain);
    k_hi = k_lo + static_cast<int>(len);
  } else {
    const auto parts = split(kr, ':');
    if (parts.size() != 2) throw UsageError("'k-range' expects lo:hi or auto[:length]");
    k_lo = static_cast<int>(to_integer("k-range", parts[0]));
    k_hi = static_cast<int>(to_integer("k-range", parts[1]));
    if (k_hi < k_lo) throw UsageError("'k-range' requires lo <= hi");
  }
  const DyadicSumReport rep = dyadic_restriction_sum(phi_n, pair, k_lo, k_hi, opt);
  Artifact a;
  a.columns = {"k", "N_k", "term", "partial_sum"};
  for (std::size_t i = 0; i < rep.ks.size(); ++i) {
    a.add({num(static_cast<long long>(rep.ks[i])), num(rep.counts[i]), num(rep.terms[i]),
           num(rep.partial_sums[i])},
          json{{"k", rep.ks[i]}, {"N_k", rep.counts[i]}, {"term", rep.terms[i]},
               {"partial_sum", rep.partial_sums[i]}, {"gap", static_cast<bool>(rep.gap[i])}});
  }
  a.summary["k0"] = k_lo;
  a.summary["q"] = q;
  a.summary["p_conjugate"] = pc;
  a.summary["tail_ratio"] = rep.tail_ratio;
  a.summary["numeric_converges"] = rep.numeric_converges;
  a.summary["numeric_diverges"] = rep.numeric_diverges;
  a.summary["analytic_lhs"] = rep.lhs;
  a.summary["analytic_rhs"] = rep.rhs;
  a.summary["analytic_holds"] = rep.analytic_holds;
  a.summary["limiting_holds"] = rep.limiting_holds;
  return a;
}

Artifact run_jacobian(const Params& P) {
  const int n = P.dimension();
  const long long samples = P.integer("samples");
  if (samples < 1 || samples > 10'000'000) throw UsageError("'samples' out of range");
  const Interval dom = P.domain();
  const SimpleCurve curve(n, make_phi(P, n, 0), dom);
  std::mt19937_64 rng(static_cast<std::uint64_t>(P.integer("seed")));
  const double lower = jacobian_lower_constant(n);
  Artifact a;
  a.columns = {"t", "h_n", "det", "v", "rolle_ratio", "J", "J_lower", "holds"};
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = -rmin;
  bool all = true;
  for (long long i = 0; i < samples; ++i) {
    const OrderedSimplexPoint pt = sample_simplex_point(dom, n, rng);
    const double det = offspring_determinant(curve, pt);
    const double v = vandermonde_factor(pt.h);
    if (v == 0.0) continue;
    const double ratio = det / v;
    const double jac = offspring_jacobian(curve, pt);
    const bool holds = jac >= lower * v;
    all = all && holds;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
    a.add({num(pt.t), num(pt.h.back()), num(det), num(v), num(ratio), num(jac),
           num(lower * v), flag(holds)},
          json{{"t", pt.t}, {"h", pt.h}, {"det", det}, {"v", v}, {"rolle_ratio", ratio},
               {"J", jac}, {"J_lower", lower * v}, {"holds", holds}});
  }
  a.summary["rolle_ratio_min"] = rmin;
  a.summary["rolle_ratio_max"] = rmax;
  a.summary["lower_constant"] = lower;
  a.summary["all_hold"] = all;
  return a;
}

std::string summary_value(const json& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    while (!s.empty() && s.back() == '\n') s.pop_back();
    std::replace(s.begin(), s.end(), '\n', ';');
    return s;
  }
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

}  // namespace

const std::vector<std::string>& commands() { return kCommands; }

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++line_no;
    std::string line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "command") {
      cfg.command = value;
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "format") {
      cfg.format = value;
    } else if (std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end()) {
      cfg.params[key] = value;
    } else {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Numerical experiments on oscillating simple curves"};
  std::string command, config_path, output, format;
  std::map<std::string, std::string> values;
  app.add_option("command", command, "derive|torsion|cover|variation|knapp|sharpness|dyadic-sum|jacobian");
  app.add_option("--config", config_path, "key = value file; flags override it");
  app.add_option("--output,-o", output, "artifact path ('-' for stdout)");
  app.add_option("--format", format, "csv or json");
  for (const auto& key : kKeys) {
    app.add_option("--" + key, values[key], "experiment parameter");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw UsageError("cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config_text(ss.str());
  }
  if (app.count("command")) cfg.command = command;
  if (app.count("--output")) cfg.output = output;
  if (app.count("--format")) cfg.format = format;
  for (const auto& key : kKeys) {
    if (app.count("--" + key)) cfg.params[key] = values[key];
  }
  if (cfg.command.empty()) throw UsageError("missing command");
  return cfg;
}

std::vector<std::pair<std::string, std::string>> resolve(const ExperimentConfig& config) {
  if (config.format != "csv" && config.format != "json") {
    throw UsageError("format must be csv or json");
  }
  const auto& declared = command_params(config.command);
  for (const auto& [key, value] : config.params) {
    const bool known = std::any_of(declared.begin(), declared.end(),
                                   [&](const auto& d) { return d.first == key; });
    if (!known) {
      throw UsageError("parameter '" + key + "' does not apply to '" + config.command + "'");
    }
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, def] : declared) {
    const auto it = config.params.find(key);
    out.emplace_back(key, it != config.params.end() ? it->second : def);
  }
  return out;
}

std::string config_checksum(const ExperimentConfig& config) {
  std::string canon = "command=" + config.command + "\nformat=" + config.format + "\n";
  for (const auto& [k, v] : resolve(config)) canon += k + "=" + v + "\n";
  return hex64(fnv1a64(canon));
}

std::string render(const ExperimentConfig& config) {
  const Params P(resolve(config));
  Artifact a;
  const std::string& c = config.command;
  if (c == "derive") {
    a = run_derive(P);
  } else if (c == "torsion") {
    a = run_torsion(P);
  } else if (c == "cover") {
    a = run_cover(P);
  } else if (c == "variation") {
    a = run_variation(P);
  } else if (c == "knapp") {
    a = run_knapp(P);
  } else if (c == "sharpness") {
    a = run_sharpness(P);
  } else if (c == "dyadic-sum") {
    a = run_dyadic(P);
  } else {
    a = run_jacobian(P);
  }

  const std::string checksum = config_checksum(config);
  if (config.format == "json") {
    json doc;
    doc["command"] = c;
    doc["topic"] = topic(c);
    doc["checksum"] = checksum;
    json params = json::object();
    for (const auto& [k, v] : P.all()) params[k] = v;
    doc["params"] = params;
    doc["columns"] = a.columns;
    doc["rows"] = a.rows_json;
    doc["summary"] = a.summary;
    return doc.dump(2) + "\n";
  }
  std::string out;
  out += "# command=" + c + "\n";
  out += "# topic=" + topic(c) + "\n";
  out += "# checksum=" + checksum + "\n";
  for (const auto& [k, v] : P.all()) out += "# param " + k + "=" + v + "\n";
  out += csv_line(a.columns);
  for (const auto& row : a.rows) out += csv_line(row);
  for (const auto& [k, v] : a.summary.items()) {
    out += "# summary " + k + "=" + summary_value(v) + "\n";
  }
  return out;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = parse_command_line(argc, argv);
    const std::string text = render(cfg);
    if (cfg.output.empty() || cfg.output == "-") {
      out << text;
    } else {
      atomic_write(cfg.output, text);
    }
    return 0;
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error in " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace oscurve::cli
