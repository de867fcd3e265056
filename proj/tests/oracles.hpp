#pragma once

// Reference computations that share no code with the library's symbolic
// engine or quadrature.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Central differences of f at t with Richardson extrapolation in h^2.
inline double richardson(const std::function<double(double)>& f, double t, double h0,
                         int levels = 6) {
  std::vector<std::vector<double>> T(levels, std::vector<double>(levels, 0.0));
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    T[i][0] = (f(t + h) - f(t - h)) / (2.0 * h);
    double p = 4.0;
    for (int j = 1; j <= i; ++j, p *= 4.0) {
      T[i][j] = T[i][j - 1] + (T[i][j - 1] - T[i - 1][j - 1]) / (p - 1.0);
    }
  }
  return T[levels - 1][levels - 1];
}

/// Complete Bell polynomial Y_n(h', ..., h^(n)) for h(t) = -t^-alpha + i t^-beta,
/// so that d^n/dt^n exp(h) = exp(h) Y_n.
inline std::complex<double> bell(int n, double alpha, double beta, double t) {
  std::vector<std::complex<double>> x(n + 1);
  for (int k = 1; k <= n; ++k) {
    double fa = 1.0, fb = 1.0;
    for (int j = 0; j < k; ++j) {
      fa *= -alpha - j;
      fb *= -beta - j;
    }
    x[k] = {-fa * std::pow(t, -alpha - k), fb * std::pow(t, -beta - k)};
  }
  std::vector<std::complex<double>> Y(n + 1);
  Y[0] = 1.0;
  for (int m = 0; m < n; ++m) {
    std::complex<double> s = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= m; ++j) {
      s += binom * Y[m - j] * x[j + 1];
      binom = binom * (m - j) / (j + 1);
    }
    Y[m + 1] = s;
  }
  return Y[n];
}

/// exp(t^-alpha) * d^n/dt^n [exp(-t^-alpha) sin(t^-beta)].
inline double seed_derivative_core(int n, double alpha, double beta, double t) {
  const double u = std::pow(t, -beta);
  const std::complex<double> Y = bell(n, alpha, beta, t);
  return std::sin(u) * Y.real() + std::cos(u) * Y.imag();
}

inline double seed_derivative(int n, double alpha, double beta, double t) {
  return std::exp(-std::pow(t, -alpha)) * seed_derivative_core(n, alpha, beta, t);
}

struct UIntegral {
  double log_value = 0.0;  ///< natural log of the integral
  std::size_t cells = 0;
};

/*!
  integral_0^delta |phi^(n)(t)|^rho dt computed in u = t^-beta:
  (1/beta) integral_{delta^-beta}^inf exp(-rho u^(alpha/beta)) |psi(u)|^rho
  u^(-1/beta - 1) du, with psi from the Bell formula. Cells between zeros of
  psi use tanh-sinh; once the per-cell log change falls below `switch_change`
  (after at least min_cells) the remainder uses the mean of |sin|^rho.
*/
inline UIntegral u_substitution_integral(int n, double alpha, double beta, double rho,
                                         double delta, double switch_change = 2e-3,
                                         std::size_t min_cells = 2000,
                                         std::size_t max_cells = 400000) {
  const double shift = rho * std::pow(delta, -alpha);
  const auto t_of = [&](double u) { return std::pow(u, -1.0 / beta); };
  const auto psi = [&](double u) { return seed_derivative_core(n, alpha, beta, t_of(u)); };
  const auto integrand = [&](double u) {
    const double t = t_of(u);
    const double a = std::abs(seed_derivative_core(n, alpha, beta, t));
    if (a == 0.0) return 0.0;
    return std::exp(rho * std::log(a) - rho * std::pow(u, alpha / beta) + shift) *
           std::pow(u, -1.0 / beta - 1.0) / beta;
  };

  boost::math::quadrature::tanh_sinh<double> ts;
  const double u0 = std::pow(delta, -beta);
  const double step = std::numbers::pi / 8.0;
  double total = 0.0;
  double lo = u0;
  double prev_cell = 0.0;
  std::size_t cells = 0;
  double s_lo = psi(lo);
  double u = lo;
  bool switched = false;
  std::uintmax_t iters = 0;
  while (!switched && cells < max_cells) {
    double un = u + step;
    double s_n = psi(un);
    if (s_lo == 0.0 || (s_lo > 0) != (s_n > 0)) {
      double z = un;
      if (s_lo != 0.0 && s_n != 0.0) {
        iters = 200;
        const auto r = boost::math::tools::toms748_solve(
            psi, u, un, s_lo, s_n, boost::math::tools::eps_tolerance<double>(50), iters);
        z = 0.5 * (r.first + r.second);
      } else if (s_lo == 0.0) {
        z = u;
      }
      if (z > lo) {
        const double base = lo;
        const double cell =
            ts.integrate([&](double s) { return integrand(base + s); }, 0.0, z - lo, 1e-11);
        total += cell;
        ++cells;
        if (cells >= min_cells && prev_cell > 0.0 &&
            std::abs(std::log(cell / prev_cell)) < switch_change) {
          switched = true;
        }
        prev_cell = cell;
        lo = z;
      }
    }
    u = un;
    s_lo = s_n;
  }

  const double c_rho = std::tgamma(0.5 * (rho + 1.0)) /
                       (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * rho + 1.0));
  const auto averaged = [&](double v) {
    const double t = t_of(v);
    const double a = std::abs(bell(n, alpha, beta, t));
    // exp(-rho u^(alpha/beta)) has long underflowed where |Y_n| overflows.
    if (!std::isfinite(a) || a == 0.0) return 0.0;
    return std::exp(rho * std::log(a) - rho * std::pow(v, alpha / beta) + shift) *
           std::pow(v, -1.0 / beta - 1.0) / beta;
  };
  boost::math::quadrature::exp_sinh<double> es;
  const double tail = es.integrate(averaged, lo, std::numeric_limits<double>::infinity());
  total += c_rho * tail;
  return {std::log(total) - shift, cells};
}

}  // namespace oracle
