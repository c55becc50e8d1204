#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fqrp/codebook.hpp"
#include "fqrp/errors.hpp"
#include "fqrp/kl.hpp"

namespace fqrp {

/// Level-2 lift of a path on a uniform grid. Component 0 is time. Areas are
/// stored from the origin, A_{0,t_i}; any A_{s,t} is rebuilt by Chen's relation
///   A_{s,t} = A_{0,t} - A_{0,s} - (x_s - x_0) (x) (x_t - x_s).
class EnhancedPath {
 public:
  EnhancedPath(double horizon, Eigen::MatrixXd level1, Eigen::MatrixXd prefix_areas);

  double horizon() const { return horizon_; }
  Eigen::Index intervals() const { return level1_.rows() - 1; }
  /// D = d + 1.
  Eigen::Index dim() const { return level1_.cols(); }
  double step() const { return horizon_ / static_cast<double>(intervals()); }

  /// (n+1) x D, row i = x(t_i).
  const Eigen::MatrixXd& level1() const { return level1_; }
  /// (n+1) x D^2, row i = A_{0,t_i} packed row-major.
  const Eigen::MatrixXd& prefix_areas() const { return prefix_; }

  /// A_{s,t} for grid indices s <= t.
  Eigen::MatrixXd area(Eigen::Index s, Eigen::Index t) const;
  /// Writes A_{s,t} (row-major, D*D entries) into out.
  void area_into(Eigen::Index s, Eigen::Index t, double* out) const;

 private:
  double horizon_;
  Eigen::MatrixXd level1_;
  Eigen::MatrixXd prefix_;
  // D x (n+1) and D^2 x (n+1) copies so each grid point is contiguous.
  Eigen::MatrixXd points_;
  Eigen::MatrixXd prefix_points_;
};

/// Stieltjes lift of a smooth sine-series path: per interval,
/// int (alpha^i_u - alpha^i_{t_j}) d alpha^j_u by 8-point Gauss-Legendre with
/// the analytic derivative.
EnhancedPath enhance_quantizer(const QuantizerPath& path, Eigen::Index intervals);

/// Grid lift of a sampled path (Brownian motion or an SDE solution).
/// Off-diagonal spatial areas are left-point sums, the diagonal is
/// (1/2) increment^2, and the time row and column use the trapezoid rule.
EnhancedPath enhance_brownian(const GridPath& path);

/// Which pairs (s, t) of grid indices a Hölder supremum visits.
/// Exhaustive up to kExhaustivePairsLimit intervals; beyond that, every gap
/// up to 64 plus all power-of-two gaps (a lower bound of the full sup).
inline constexpr Eigen::Index kExhaustivePairsLimit = 4096;
std::vector<Eigen::Index> holder_gaps(Eigen::Index intervals);

/// T^a sup_{s<t} f(s, t) / (t - s)^a over grid pairs, a = exponent.
template <typename PairNorm>
double holder_sup(Eigen::Index intervals, double horizon, double exponent, PairNorm&& pair_norm) {
  const double h = horizon / static_cast<double>(intervals);
  double best = 0.0;
  for (Eigen::Index gap : holder_gaps(intervals)) {
    const double scale = std::pow(static_cast<double>(gap) * h, -exponent);
    double local = 0.0;
    for (Eigen::Index s = 0; s + gap <= intervals; ++s) local = std::max(local, pair_norm(s, s + gap));
    best = std::max(best, local * scale);
  }
  return std::pow(horizon, exponent) * best;
}

/// (sup over grid sub-partitions of sum_l f(t_l, t_{l+1})^p)^{1/p}, exact
/// O(n^2) dynamic program. Throws SizeError beyond 4096 intervals.
template <typename PairNorm>
double variation_dp(Eigen::Index intervals, double p, PairNorm&& pair_norm) {
  if (intervals > kExhaustivePairsLimit) throw SizeError("p-variation: more than 4096 intervals");
  if (!(p >= 1.0)) throw DomainError("p-variation: p must be >= 1");
  std::vector<double> best(intervals + 1, 0.0);
  double overall = 0.0;
  for (Eigen::Index t = 1; t <= intervals; ++t) {
    double v = 0.0;
    for (Eigen::Index s = 0; s < t; ++s) v = std::max(v, best[s] + std::pow(pair_norm(s, t), p));
    best[t] = v;
    overall = std::max(overall, v);
  }
  return std::pow(overall, 1.0 / p);
}

namespace detail {
/// D x (n+1) copy so each grid point is contiguous.
template <typename Derived>
Eigen::MatrixXd point_columns(const Eigen::MatrixBase<Derived>& values) {
  return values.transpose();
}
}  // namespace detail

/// Level-1 1/q-Hölder semi-norm T^{1/q} sup |x_t - x_s| / (t - s)^{1/q} of a
/// path on a uniform grid over [0, horizon] (rows are grid points).
template <typename Derived>
double holder_seminorm(const Eigen::MatrixBase<Derived>& values, double horizon, double q) {
  if (!(q > 0.0)) throw DomainError("holder_seminorm: q must be positive");
  const Eigen::MatrixXd pts = detail::point_columns(values);
  return holder_sup(pts.cols() - 1, horizon, 1.0 / q,
                    [&](Eigen::Index s, Eigen::Index t) { return (pts.col(t) - pts.col(s)).norm(); });
}

/// Level-1 q-variation semi-norm (sup over grid sub-partitions).
template <typename Derived>
double p_variation(const Eigen::MatrixBase<Derived>& values, double p) {
  const Eigen::MatrixXd pts = detail::point_columns(values);
  return variation_dp(pts.cols() - 1, p,
                      [&](Eigen::Index s, Eigen::Index t) { return (pts.col(t) - pts.col(s)).norm(); });
}

/// sup_t |x_t - x_0|.
template <typename Derived>
double sup_distance_from_start(const Eigen::MatrixBase<Derived>& values) {
  return (values.rowwise() - values.row(0)).rowwise().norm().maxCoeff();
}

/// Level-2 q/2-Hölder semi-norm T^{2/q} sup |A_{s,t}| / (t - s)^{2/q}.
double holder_seminorm_level2(const EnhancedPath& x, double q);

/// rho_q(X, Y) = ||x - y||_{q,Hol} + ||A^X - A^Y||_{q/2,Hol}.
double rho_q(const EnhancedPath& x, const EnhancedPath& y, double q);
/// delta_p(X, Y) = Var_p(x - y) + Var_{p/2}(A^X - A^Y).
double delta_p(const EnhancedPath& x, const EnhancedPath& y, double p);

/// The two terms of rho_q separately.
struct RhoTerms {
  double level1 = 0.0;
  double level2 = 0.0;
  double total() const { return level1 + level2; }
};
RhoTerms rho_q_terms(const EnhancedPath& x, const EnhancedPath& y, double q);

}  // namespace fqrp
