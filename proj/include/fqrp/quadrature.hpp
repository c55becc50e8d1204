#pragma once

#include <Eigen/Dense>

#include <functional>

namespace fqrp::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Nodes and weights from the Golub-Welsch eigenproblem. Cached per order.
const GaussLegendre& gauss_legendre(int order);

/// Fixed-order rule on [a, b].
template <typename F>
double integrate_fixed(F&& f, double a, double b, int order) {
  const auto& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Globally adaptive bisection with a 15-point Gauss-Legendre rule. Stops
/// when the summed panel error estimate is below max(abs_tol, rel_tol*|I|).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          double abs_tol = 0.0, int max_panels = 4096);

}  // namespace fqrp::quad
