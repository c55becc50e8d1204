#pragma once

#include <Eigen/Dense>

#include <vector>

#include "fqrp/allocation.hpp"
#include "fqrp/kl.hpp"
#include "fqrp/scalar_quant.hpp"

namespace fqrp {

/// Flat cell index: one 0-based level index per (component, frequency),
/// row-major with the component as the outer loop.
using MultiIndex = std::vector<int>;

/// Finite sine series alpha(t) = sum_k c_k sqrt(2/T) sin(t / sqrt(lambda_k)),
/// one coefficient column per component. Time itself is not stored.
class QuantizerPath {
 public:
  QuantizerPath(double horizon, Eigen::VectorXd lambda, Eigen::MatrixXd coefficients);

  /// The zero path in dim components.
  static QuantizerPath zero(double horizon, Eigen::Index dim);

  double horizon() const { return horizon_; }
  Eigen::Index dim() const { return coefficients_.cols(); }
  Eigen::Index frequencies() const { return coefficients_.rows(); }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  /// frequencies x dim.
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd derivative(double t) const;
  /// Samples on the uniform grid with the given number of intervals.
  GridPath sample(Eigen::Index intervals) const;

 private:
  double horizon_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd frequency_;  // 1 / sqrt(lambda_k)
  Eigen::MatrixXd coefficients_;
};

/// Product quantizer of d-dimensional Brownian motion on [0, T]: every
/// component uses the optimal allocation for the budget floor(N^{1/d}).
struct ProductCodebook {
  int dim = 1;
  double horizon = 1.0;
  long budget = 1;
  BitAllocation allocation;
  Eigen::VectorXd lambda;  // eigenvalues of the active frequencies
  std::vector<ScalarQuantizer> quantizers;  // one per active frequency

  int frequencies() const { return allocation.active(); }
  /// Cells per component, prod_k N_k.
  long component_size() const { return allocation.achieved_size(); }
  /// Total number of cells, (prod_k N_k)^d.
  long size() const;
  std::size_t index_length() const { return static_cast<std::size_t>(dim) * frequencies(); }

  MultiIndex unflatten(long cell) const;
  long flatten(const MultiIndex& idx) const;
};

/// Largest integer r with r^d <= n.
long integer_root(long n, int d);

/// Optimal integral bit allocation for one Brownian component.
BitAllocation optimal_bit_allocation(long budget, double horizon);

ProductCodebook build_product_codebook(long budget, int dim, double horizon);

QuantizerPath elementary_path(const ProductCodebook& cb, const MultiIndex& idx);

/// Nearest codebook cell in L^2([0,T]): coordinate-wise scalar projection of
/// the path's K-L coefficients.
MultiIndex voronoi_project(const GridPath& path, const ProductCodebook& cb);

double cell_weight(const ProductCodebook& cb, const MultiIndex& idx);

/// Exact squared L^2(P; L^2_T) error of the product quantization.
double codebook_distortion(const ProductCodebook& cb);

/// int_0^t phi dWhat for the elementary path of idx, per component:
/// sqrt(2/T) sum_k (c_k / sqrt(lambda_k)) int_0^t phi(s) cos(s / sqrt(lambda_k)) ds
/// with the trapezoid rule. phi holds one value per grid point of a grid
/// with phi.size() - 1 intervals over [0, T]; t must be a grid point.
Eigen::VectorXd quantized_wiener_integral(const ProductCodebook& cb, const MultiIndex& idx,
                                          const Eigen::VectorXd& phi, double t);

}  // namespace fqrp
