#include <oscurve/errors.hpp>
#include <oscurve/extended_real.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace oscurve {
namespace {

// ln 2 split into three doubles; k * ln2 is reduced with fma so that the
// remainder keeps full precision even for |k| ~ 2^45.
constexpr double kLn2Hi = 0x1.62e42fefa39efp-1;
constexpr double kLn2Mid = 0x1.abc9e3b39803fp-56;
constexpr double kLn2Lo = 0x1.7b57a079a1934p-111;
constexpr double kInvLn2 = 1.4426950408889634074;

ExtendedReal normalized(double value, std::int64_t extra_scale) {
  if (!std::isfinite(value)) {
    throw DomainError("ExtendedReal", "non-finite value");
  }
  return ExtendedReal::from_parts(value, extra_scale);
}

}  // namespace

ExtendedReal::ExtendedReal(double value) {
  *this = normalized(value, 0);
}

ExtendedReal ExtendedReal::from_parts(double mantissa, std::int64_t scale) {
  ExtendedReal out;
  if (mantissa == 0.0) return out;
  if (!std::isfinite(mantissa)) {
    throw DomainError("ExtendedReal", "non-finite mantissa");
  }
  int e = 0;
  const double m = std::frexp(mantissa, &e);  // |m| in [0.5, 1)
  out.mantissa_ = 2.0 * m;
  out.scale_ = scale + static_cast<std::int64_t>(e) - 1;
  return out;
}

ExtendedReal ExtendedReal::exp(double x) {
  if (std::isnan(x)) throw DomainError("ExtendedReal::exp", "NaN argument");
  if (x == -std::numeric_limits<double>::infinity()) return {};
  if (!std::isfinite(x)) throw DomainError("ExtendedReal::exp", "overflow");
  const double k = std::nearbyint(x * kInvLn2);
  double r = std::fma(-k, kLn2Hi, x);
  r = std::fma(-k, kLn2Mid, r);
  r = std::fma(-k, kLn2Lo, r);
  return normalized(std::exp(r), static_cast<std::int64_t>(k));
}

ExtendedReal ExtendedReal::from_log(double log_magnitude, int sign) {
  if (sign == 0) return {};
  ExtendedReal out = exp(log_magnitude);
  if (sign < 0) out.mantissa_ = -out.mantissa_;
  return out;
}

ExtendedReal ExtendedReal::from_log2(double log2_magnitude, int sign) {
  if (sign == 0 || log2_magnitude == -std::numeric_limits<double>::infinity())
    return {};
  if (!std::isfinite(log2_magnitude)) {
    throw DomainError("ExtendedReal::from_log2", "non-finite argument");
  }
  const double k = std::floor(log2_magnitude);
  const double frac = log2_magnitude - k;  // exact
  ExtendedReal out = normalized(std::exp2(frac), static_cast<std::int64_t>(k));
  if (sign < 0) out.mantissa_ = -out.mantissa_;
  return out;
}

double ExtendedReal::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  const double s = static_cast<double>(scale_);
  return std::fma(s, kLn2Hi, std::log(std::abs(mantissa_))) + s * kLn2Mid;
}

double ExtendedReal::log2_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(scale_) + std::log2(std::abs(mantissa_));
}

double ExtendedReal::log10_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return log2_abs() * 0.30102999566398119521;
}

double ExtendedReal::to_double() const {
  if (is_zero()) return 0.0;
  constexpr std::int64_t kClamp = 1 << 14;
  const auto s = scale_ > kClamp ? kClamp : (scale_ < -kClamp ? -kClamp : scale_);
  return std::ldexp(mantissa_, static_cast<int>(s));
}

ExtendedReal ExtendedReal::abs() const {
  ExtendedReal out = *this;
  out.mantissa_ = std::abs(out.mantissa_);
  return out;
}

ExtendedReal ExtendedReal::pow_abs(double p) const {
  if (is_zero()) {
    if (p > 0) return {};
    if (p == 0) return ExtendedReal(1.0);
    throw DomainError("ExtendedReal::pow_abs", "zero to a negative power");
  }
  // p * (scale + log2|m|) with the product p * scale kept exact.
  const double s = static_cast<double>(scale_);
  const double prod = p * s;
  const double prod_err = std::fma(p, s, -prod);
  const double k = std::floor(prod);
  const double frac = (prod - k) + (prod_err + p * std::log2(std::abs(mantissa_)));
  return from_log2(frac) * from_parts(1.0, static_cast<std::int64_t>(k));
}

ExtendedReal ExtendedReal::operator-() const {
  ExtendedReal out = *this;
  out.mantissa_ = -out.mantissa_;
  return out;
}

ExtendedReal& ExtendedReal::operator*=(const ExtendedReal& rhs) {
  if (is_zero() || rhs.is_zero()) {
    *this = {};
    return *this;
  }
  *this = from_parts(mantissa_ * rhs.mantissa_, scale_ + rhs.scale_);
  return *this;
}

ExtendedReal& ExtendedReal::operator/=(const ExtendedReal& rhs) {
  if (rhs.is_zero()) throw DomainError("ExtendedReal", "division by zero");
  if (is_zero()) return *this;
  *this = from_parts(mantissa_ / rhs.mantissa_, scale_ - rhs.scale_);
  return *this;
}

ExtendedReal& ExtendedReal::operator+=(const ExtendedReal& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) {
    *this = rhs;
    return *this;
  }
  const ExtendedReal& big = scale_ >= rhs.scale_ ? *this : rhs;
  const ExtendedReal& small = scale_ >= rhs.scale_ ? rhs : *this;
  const std::int64_t shift = big.scale_ - small.scale_;
  if (shift > 64) {
    *this = big;
    return *this;
  }
  const double sum =
      big.mantissa_ + std::ldexp(small.mantissa_, -static_cast<int>(shift));
  *this = from_parts(sum, big.scale_);
  return *this;
}

ExtendedReal& ExtendedReal::operator-=(const ExtendedReal& rhs) {
  return *this += -rhs;
}

std::partial_ordering operator<=>(const ExtendedReal& lhs,
                                  const ExtendedReal& rhs) noexcept {
  const int ls = lhs.sign();
  const int rs = rhs.sign();
  if (ls != rs) return ls <=> rs;
  if (ls == 0) return std::partial_ordering::equivalent;
  std::partial_ordering mag = std::partial_ordering::equivalent;
  if (lhs.scale_ != rhs.scale_) {
    mag = lhs.scale_ <=> rhs.scale_;
  } else {
    mag = std::abs(lhs.mantissa_) <=> std::abs(rhs.mantissa_);
  }
  if (ls > 0) return mag;
  if (mag == std::partial_ordering::less) return std::partial_ordering::greater;
  if (mag == std::partial_ordering::greater) return std::partial_ordering::less;
  return mag;
}

std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
  if (x.is_zero()) return os << "0";
  const double l10 = x.log10_abs();
  double e10 = std::floor(l10);
  double m10 = std::pow(10.0, l10 - e10);
  if (m10 >= 10.0) {
    m10 /= 10.0;
    e10 += 1.0;
  }
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << (x.sign() < 0 ? "-" : "") << std::setprecision(15) << m10 << "e"
     << static_cast<std::int64_t>(e10);
  os.flags(flags);
  os.precision(prec);
  return os;
}

}  // namespace oscurve
