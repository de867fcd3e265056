#include <oscurve/errors.hpp>
#include <oscurve/quadrature.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace oscurve {

QuadratureRule gauss_jacobi(int order, double a, double b) {
  if (order < 1 || !(a > -1.0) || !(b > -1.0)) {
    throw PreconditionError("quadrature::gauss_jacobi", "need order >= 1, a, b > -1");
  }
  const double ab = a + b;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 0; k < order; ++k) {
    const double s = 2.0 * k + ab;
    jac(k, k) = k == 0 ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < order) {
      const double m = k + 1.0;
      const double sm = 2.0 * m + ab;
      const double beta2 =
          k == 0 ? 4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0))
                 : 4.0 * m * (m + a) * (m + b) * (m + ab) /
                       (sm * sm * (sm + 1.0) * (sm - 1.0));
      jac(k, k + 1) = jac(k + 1, k) = std::sqrt(beta2);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_legendre(int order) { return gauss_jacobi(order, 0.0, 0.0); }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    return std::accumulate(values.begin(), values.end(), 0.0);
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace oscurve
