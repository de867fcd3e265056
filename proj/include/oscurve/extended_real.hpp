#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>

namespace oscurve {

/*!
  Floating point value with a 64-bit binary exponent.

  The value is mantissa * 2^scale with |mantissa| in [1, 2), or exactly zero.
  Values such as exp(-1e12) are representable without underflow; the
  precision is that of the double mantissa.
*/
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  explicit ExtendedReal(double value);

  /// e^x for any finite x. The binary exponent is split off before calling
  /// std::exp, so the relative error is a few ulp of the mantissa.
  static ExtendedReal exp(double x);

  /// sign * e^log_magnitude. sign == 0 yields zero.
  static ExtendedReal from_log(double log_magnitude, int sign = 1);

  /// sign * 2^log2_magnitude.
  static ExtendedReal from_log2(double log2_magnitude, int sign = 1);

  /// mantissa * 2^scale, normalizing the mantissa if needed.
  static ExtendedReal from_parts(double mantissa, std::int64_t scale);

  double mantissa() const noexcept { return mantissa_; }
  std::int64_t scale() const noexcept { return scale_; }
  int sign() const noexcept { return (mantissa_ > 0) - (mantissa_ < 0); }
  bool is_zero() const noexcept { return mantissa_ == 0.0; }

  /// Natural log of |x|; -inf for zero.
  double log_abs() const;
  double log2_abs() const;
  double log10_abs() const;

  /// Nearest double; flushes to zero or +-inf outside the double range.
  double to_double() const;

  ExtendedReal abs() const;

  /// |x|^p. Zero stays zero for p > 0.
  ExtendedReal pow_abs(double p) const;

  ExtendedReal operator-() const;
  ExtendedReal& operator*=(const ExtendedReal& rhs);
  ExtendedReal& operator/=(const ExtendedReal& rhs);
  ExtendedReal& operator+=(const ExtendedReal& rhs);
  ExtendedReal& operator-=(const ExtendedReal& rhs);

  friend ExtendedReal operator*(ExtendedReal lhs, const ExtendedReal& rhs) {
    return lhs *= rhs;
  }
  friend ExtendedReal operator/(ExtendedReal lhs, const ExtendedReal& rhs) {
    return lhs /= rhs;
  }
  friend ExtendedReal operator+(ExtendedReal lhs, const ExtendedReal& rhs) {
    return lhs += rhs;
  }
  friend ExtendedReal operator-(ExtendedReal lhs, const ExtendedReal& rhs) {
    return lhs -= rhs;
  }

  friend bool operator==(const ExtendedReal& lhs,
                         const ExtendedReal& rhs) noexcept {
    return lhs.mantissa_ == rhs.mantissa_ &&
           (lhs.mantissa_ == 0.0 || lhs.scale_ == rhs.scale_);
  }
  friend std::partial_ordering operator<=>(const ExtendedReal& lhs,
                                           const ExtendedReal& rhs) noexcept;

 private:
  double mantissa_ = 0.0;
  std::int64_t scale_ = 0;
};

std::ostream& operator<<(std::ostream& os, const ExtendedReal& x);

}  // namespace oscurve
