#include "fqrp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <vector>

#include "fqrp/errors.hpp"

namespace fqrp::quad {

namespace {

GaussLegendre golub_welsch(int order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussLegendre rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double whole = integrate_fixed(f, a, b, 15);
  const double m = 0.5 * (a + b);
  const double halves = integrate_fixed(f, a, m, 15) + integrate_fixed(f, m, b, 15);
  return {a, b, halves, std::abs(halves - whole)};
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, golub_welsch(order)).first;
  return it->second;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          double abs_tol, int max_panels) {
  if (a == b) return 0.0;
  std::priority_queue<Panel> panels;
  panels.push(evaluate_panel(f, a, b));
  double total = panels.top().value;
  double error = panels.top().error;
  int count = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_panels) {
    const Panel worst = panels.top();
    panels.pop();
    const double m = 0.5 * (worst.a + worst.b);
    const Panel left = evaluate_panel(f, worst.a, m);
    const Panel right = evaluate_panel(f, m, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  total = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    panels.pop();
  }
  return total;
}

}  // namespace fqrp::quad
