#include "fqrp/scalar_quant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "fqrp/errors.hpp"
#include "fqrp/normal.hpp"
#include "fqrp/quadrature.hpp"

namespace fqrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kNewtonIterations = 100;
constexpr int kLloydIterations = 200000;
constexpr double kMeritSwitch = 1e-6;

double pdf_or_zero(double x) { return std::isfinite(x) ? normal::pdf(x) : 0.0; }

/// Centroid residual max_i |level_i - E(Z | cell_i)|.
double centroid_residual(const Eigen::VectorXd& levels, const CellMoments& moments) {
  return (levels - moments.centroid).cwiseAbs().maxCoeff();
}

void symmetrize(Eigen::VectorXd& levels) {
  const Eigen::VectorXd mirrored = levels.reverse();
  levels = 0.5 * (levels - mirrored);
}

bool strictly_increasing(const Eigen::VectorXd& levels) {
  for (Eigen::Index i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1])) return false;
  return true;
}

/// Newton step for the gradient g_i = p_i * level_i - (phi(m_{i-1}) - phi(m_i)) of
/// half the distortion. Solves the tridiagonal system with the Thomas algorithm.
Eigen::VectorXd newton_direction(const Eigen::VectorXd& levels, const CellMoments& moments) {
  const Eigen::Index n = levels.size();
  Eigen::VectorXd grad = moments.mass.cwiseProduct(levels - moments.centroid);
  Eigen::VectorXd diag(n), upper(n), lower(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double right = i + 1 < n ? 0.25 * normal::pdf(0.5 * (levels[i] + levels[i + 1])) * (levels[i + 1] - levels[i]) : 0.0;
    const double left = i > 0 ? 0.25 * normal::pdf(0.5 * (levels[i - 1] + levels[i])) * (levels[i] - levels[i - 1]) : 0.0;
    diag[i] = moments.mass[i] - right - left;
    upper[i] = -right;
    lower[i] = -left;
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    grad[i] -= w * grad[i - 1];
  }
  Eigen::VectorXd step(n);
  step[n - 1] = grad[n - 1] / diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) step[i] = (grad[i] - upper[i] * step[i + 1]) / diag[i];
  return step;
}

ScalarQuantizer finish(Eigen::VectorXd levels, double residual) {
  ScalarQuantizer q;
  const CellMoments moments = cell_moments(levels);
  q.weights = moments.mass;
  q.distortion = quantizer_distortion(levels);
  q.residual = residual;
  q.levels = std::move(levels);
  return q;
}

ScalarQuantizer solve_stationary(int size, double tol) {
  Eigen::VectorXd levels(size);
  for (int i = 0; i < size; ++i) levels[i] = std::sqrt(3.0) * normal::quantile((i + 0.5) / size);
  symmetrize(levels);
  if (size == 1) return finish(levels, 0.0);

  CellMoments moments = cell_moments(levels);
  double residual = centroid_residual(levels, moments);
  double distortion = quantizer_distortion(levels);
  for (int it = 0; it < kNewtonIterations && residual >= tol; ++it) {
    // Far from the fixed point the distortion is the merit function; close
    // to it the distortion is flat to rounding, so the residual takes over.
    const bool global_phase = residual > kMeritSwitch;
    const Eigen::VectorXd step = newton_direction(levels, moments);
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      Eigen::VectorXd trial = levels - scale * step;
      symmetrize(trial);
      if (!strictly_increasing(trial)) continue;
      const CellMoments trial_moments = cell_moments(trial);
      const double trial_residual = centroid_residual(trial, trial_moments);
      const double trial_distortion = quantizer_distortion(trial);
      if (global_phase ? trial_distortion < distortion : trial_residual < residual) {
        levels = std::move(trial);
        moments = trial_moments;
        residual = trial_residual;
        distortion = trial_distortion;
        accepted = true;
        break;
      }
    }
    if (accepted) continue;
    if (!global_phase) break;
    // Newton direction is not a descent direction here; take a Lloyd step.
    levels = moments.centroid;
    symmetrize(levels);
    moments = cell_moments(levels);
    residual = centroid_residual(levels, moments);
    distortion = quantizer_distortion(levels);
  }
  // Lloyd fallback: contracts monotonically for log-concave densities.
  for (int it = 0; it < kLloydIterations && residual >= tol; ++it) {
    levels = moments.centroid;
    symmetrize(levels);
    moments = cell_moments(levels);
    residual = centroid_residual(levels, moments);
  }
  if (residual >= tol)
    throw SolverFailure("optimal_scalar_quantizer: no convergence for N=" + std::to_string(size), residual);
  return finish(std::move(levels), residual);
}

}  // namespace

double ScalarQuantizer::upper_boundary(Eigen::Index i) const {
  return i + 1 < levels.size() ? 0.5 * (levels[i] + levels[i + 1]) : kInf;
}

double ScalarQuantizer::lower_boundary(Eigen::Index i) const {
  return i > 0 ? 0.5 * (levels[i - 1] + levels[i]) : -kInf;
}

CellMoments cell_moments(const Eigen::VectorXd& levels) {
  const Eigen::Index n = levels.size();
  CellMoments out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  double lower = -kInf;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double upper = i + 1 < n ? 0.5 * (levels[i] + levels[i + 1]) : kInf;
    out.mass[i] = normal::mass(lower, upper);
    out.centroid[i] = (pdf_or_zero(lower) - pdf_or_zero(upper)) / out.mass[i];
    lower = upper;
  }
  return out;
}

double quantizer_distortion(const Eigen::VectorXd& levels) {
  // Per cell: int_a^b (z - beta)^2 phi = P(1 + beta^2) + (a - 2 beta) phi(a) - (b - 2 beta) phi(b).
  const Eigen::Index n = levels.size();
  double total = 0.0;
  double lower = -kInf;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double upper = i + 1 < n ? 0.5 * (levels[i] + levels[i + 1]) : kInf;
    const double beta = levels[i];
    double cell = normal::mass(lower, upper) * (1.0 + beta * beta);
    if (std::isfinite(lower)) cell += (lower - 2.0 * beta) * normal::pdf(lower);
    if (std::isfinite(upper)) cell -= (upper - 2.0 * beta) * normal::pdf(upper);
    total += cell;
    lower = upper;
  }
  return total;
}

ScalarQuantizer optimal_scalar_quantizer(int size, double tol) {
  if (size < 1) throw DomainError("optimal_scalar_quantizer: size must be >= 1");
  if (!(tol > 0.0 && tol <= 1e-6)) throw DomainError("optimal_scalar_quantizer: tol must lie in (0, 1e-6]");
  if (tol != kDefaultStationarityTol) return solve_stationary(size, tol);
  static std::mutex mutex;
  static std::map<int, ScalarQuantizer> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(size); it != cache.end()) return it->second;
  }
  ScalarQuantizer q = solve_stationary(size, tol);
  std::lock_guard lock(mutex);
  return cache.emplace(size, std::move(q)).first->second;
}

double scalar_distortion(int size) { return optimal_scalar_quantizer(size).distortion; }

Eigen::Index quantize_scalar(double x, const ScalarQuantizer& q) {
  // Number of cell boundaries strictly below x.
  Eigen::Index lo = 0, hi = q.size() - 1;
  while (lo < hi) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (0.5 * (q.levels[mid] + q.levels[mid + 1]) < x)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

double lp_error(const ScalarQuantizer& q, double p) {
  if (!(p > 0.0 && p <= 16.0)) throw DomainError("lp_error: p must lie in (0, 16]");
  // phi underflows beyond |z| = 40.
  constexpr double kCut = 40.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double beta = q.levels[i];
    const double a = std::max(q.lower_boundary(i), -kCut);
    const double b = std::min(q.upper_boundary(i), kCut);
    auto integrand = [beta, p](double z) { return std::pow(std::abs(z - beta), p) * normal::pdf(z); };
    if (a < beta) total += quad::integrate_adaptive(integrand, a, std::min(beta, b), 1e-11, 1e-300);
    if (beta < b) total += quad::integrate_adaptive(integrand, std::max(beta, a), b, 1e-11, 1e-300);
  }
  return std::pow(total, 1.0 / p);
}

}  // namespace fqrp
