#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace oscurve {

/// Gauss rule on [-1, 1] for the weight (1 - x)^a (1 + x)^b.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const { return nodes.size(); }

  /// integral_lo^hi (hi - t)^a (t - lo)^b h(t) dt.
  template <typename F>
  double integrate(double lo, double hi, F&& h) const {
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      sum += weights[i] * h(lo + half * (nodes[i] + 1.0));
    }
    return sum * std::pow(half, a + b + 1.0);
  }
};

/// Golub-Welsch on the Jacobi matrix; a, b > -1.
QuadratureRule gauss_jacobi(int order, double a, double b);
QuadratureRule gauss_legendre(int order);

/// Fixed-order pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace oscurve
