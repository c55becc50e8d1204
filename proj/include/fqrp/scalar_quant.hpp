#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace fqrp {

/// Optimal quadratic quantizer of N(0, 1): sorted levels, the probability of
/// each Voronoi cell and the squared L2 error E min_i (Z - level_i)^2.
struct ScalarQuantizer {
  Eigen::VectorXd levels;
  Eigen::VectorXd weights;
  double distortion = 1.0;
  /// max_i |level_i - E(Z | cell_i)| at return.
  double residual = 0.0;

  Eigen::Index size() const { return levels.size(); }
  /// Upper boundary of cell i; +inf for the last cell.
  double upper_boundary(Eigen::Index i) const;
  double lower_boundary(Eigen::Index i) const;
};

inline constexpr double kDefaultStationarityTol = 1e-12;

/// The unique stationary N-level quantizer of the standard normal.
///
/// Damped Newton iteration on the centroid equations (the Hessian is
/// tridiagonal), started from the companding guess sqrt(3) * Phi^{-1}((i-1/2)/N).
/// Falls back to Lloyd iterations if Newton stalls; throws SolverFailure when
/// the centroid residual is still above tol after the fallback. Results for
/// the default tolerance are memoized.
ScalarQuantizer optimal_scalar_quantizer(int size, double tol = kDefaultStationarityTol);

/// Distortion of the optimal quantizer of the given size (memoized).
double scalar_distortion(int size);

/// Index of the nearest level (0-based). A point on a cell boundary goes to
/// the lower cell.
Eigen::Index quantize_scalar(double x, const ScalarQuantizer& q);

/// ||Z - Zhat||_p by adaptive quadrature of the per-cell integrals.
double lp_error(const ScalarQuantizer& q, double p);

/// Centroid and mass of every cell of an arbitrary sorted level set under
/// N(0, 1), with exact Gaussian integrals.
struct CellMoments {
  Eigen::VectorXd mass;
  Eigen::VectorXd centroid;
};
CellMoments cell_moments(const Eigen::VectorXd& levels);

/// Exact squared error of an arbitrary sorted level set under N(0, 1).
double quantizer_distortion(const Eigen::VectorXd& levels);

/// Monte Carlo Lloyd codebook for N(0, Diag(variances)) in R^L.
struct GaussianDiagCodebook {
  Eigen::VectorXd variances;
  /// One point per row.
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  double distortion = 0.0;
  double standard_error = 0.0;
  /// Exact distortion of the product codebook used as the starting point.
  double initial_distortion = 0.0;
  int iterations = 0;

  Eigen::Index dim() const { return variances.size(); }
  Eigen::Index size() const { return points.rows(); }
};

inline constexpr int kLloydBatchSize = 100000;

/// Randomized Lloyd started from the optimal product codebook of size <= N.
/// Every iteration draws a fresh batch of kLloydBatchSize samples; each
/// candidate is scored on one fixed evaluation batch and the best one is
/// kept, so the returned estimate never exceeds the estimate of the starting
/// codebook. Deterministic for a given seed regardless of worker count.
GaussianDiagCodebook lloyd_gaussian_diag(const Eigen::VectorXd& variances, int size, std::uint64_t seed,
                                         int iterations);

}  // namespace fqrp
