#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace fqrp {

/// Path sampled on the uniform grid t_i = i T / n, i = 0..n. Row i of
/// values is the state at t_i.
class GridPath {
 public:
  GridPath() = default;
  GridPath(double horizon, Eigen::MatrixXd values);

  double horizon() const { return horizon_; }
  Eigen::Index intervals() const { return values_.rows() - 1; }
  Eigen::Index points() const { return values_.rows(); }
  Eigen::Index dim() const { return values_.cols(); }
  double step() const { return horizon_ / static_cast<double>(intervals()); }
  double time(Eigen::Index i) const { return horizon_ * static_cast<double>(i) / static_cast<double>(intervals()); }
  Eigen::VectorXd times() const;

  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }

 private:
  double horizon_ = 1.0;
  Eigen::MatrixXd values_;
};

/// Brownian covariance eigenvalue (T / (pi (k - 1/2)))^2, k >= 1.
double eigenvalue(int k, double horizon);
/// The first count eigenvalues.
Eigen::VectorXd eigenvalues(int count, double horizon);
/// sqrt(2/T) sin(t / sqrt(lambda_k)).
double basis_eval(int k, double t, double horizon);

/// The K-L truncation of Brownian motion on [0, T] to K terms.
struct KLBasis {
  double horizon = 1.0;
  Eigen::VectorXd lambda;

  static KLBasis make(int terms, double horizon) { return {horizon, eigenvalues(terms, horizon)}; }
  int terms() const { return static_cast<int>(lambda.size()); }
};

/// Exact Gaussian increments with variance T/n per step and component.
GridPath simulate_brownian(Eigen::Index intervals, Eigen::Index dim, double horizon, std::uint64_t seed);

/// xi_k = sqrt(2/T) int W_t sin(t / sqrt(lambda_k)) dt / sqrt(lambda_k) by the
/// trapezoid rule, one column per component (K x d). Requires n >= 2K.
Eigen::MatrixXd kl_coefficients(const GridPath& path, int terms);

/// Piecewise-linear interpolation through the path values at the knots,
/// resampled on the path grid. Knots must start at 0, end at T, increase
/// strictly and sit on grid points.
GridPath conditional_interpolation(const GridPath& path, std::span<const double> knots);

/// Grid index of t; throws GridError if t is not a grid point.
Eigen::Index grid_index(const GridPath& path, double t);

}  // namespace fqrp
