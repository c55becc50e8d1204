#include "fqrp/kl.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fqrp/errors.hpp"

namespace fqrp {

GridPath::GridPath(double horizon, Eigen::MatrixXd values) : horizon_(horizon), values_(std::move(values)) {
  if (!(horizon > 0.0)) throw DomainError("GridPath: horizon must be positive");
  if (values_.rows() < 2) throw GridError("GridPath: need at least one interval");
}

Eigen::VectorXd GridPath::times() const {
  return Eigen::VectorXd::LinSpaced(points(), 0.0, horizon_);
}

double eigenvalue(int k, double horizon) {
  if (k < 1) throw DomainError("eigenvalue: k must be >= 1");
  if (!(horizon > 0.0)) throw DomainError("eigenvalue: horizon must be positive");
  const double r = horizon / (std::numbers::pi * (k - 0.5));
  return r * r;
}

Eigen::VectorXd eigenvalues(int count, double horizon) {
  Eigen::VectorXd out(count);
  for (int k = 0; k < count; ++k) out[k] = eigenvalue(k + 1, horizon);
  return out;
}

double basis_eval(int k, double t, double horizon) {
  return std::sqrt(2.0 / horizon) * std::sin(t / std::sqrt(eigenvalue(k, horizon)));
}

GridPath simulate_brownian(Eigen::Index intervals, Eigen::Index dim, double horizon, std::uint64_t seed) {
  if (intervals < 1) throw DomainError("simulate_brownian: need at least one interval");
  if (dim < 1) throw DomainError("simulate_brownian: dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const double scale = std::sqrt(horizon / static_cast<double>(intervals));
  Eigen::MatrixXd values(intervals + 1, dim);
  values.row(0).setZero();
  for (Eigen::Index i = 1; i <= intervals; ++i)
    for (Eigen::Index c = 0; c < dim; ++c) values(i, c) = values(i - 1, c) + scale * gauss(rng);
  return GridPath(horizon, std::move(values));
}

Eigen::MatrixXd kl_coefficients(const GridPath& path, int terms) {
  if (terms < 0) throw DomainError("kl_coefficients: negative term count");
  if (path.intervals() < 2 * terms)
    throw ResolutionError("kl_coefficients: grid of " + std::to_string(path.intervals()) +
                          " intervals is too coarse for " + std::to_string(terms) + " terms");
  const double T = path.horizon();
  const Eigen::VectorXd t = path.times();
  Eigen::VectorXd trapezoid = Eigen::VectorXd::Constant(path.points(), path.step());
  trapezoid[0] *= 0.5;
  trapezoid[path.points() - 1] *= 0.5;
  Eigen::MatrixXd out(terms, path.dim());
  for (int k = 0; k < terms; ++k) {
    const double root = std::sqrt(eigenvalue(k + 1, T));
    const Eigen::VectorXd kernel =
        (std::sqrt(2.0 / T) / root) * trapezoid.cwiseProduct((t.array() / root).sin().matrix());
    out.row(k) = kernel.transpose() * path.values();
  }
  return out;
}

Eigen::Index grid_index(const GridPath& path, double t) {
  const double x = t / path.step();
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)) || r < 0 || r > path.intervals())
    throw GridError("time " + std::to_string(t) + " is not a grid point");
  return static_cast<Eigen::Index>(r);
}

GridPath conditional_interpolation(const GridPath& path, std::span<const double> knots) {
  if (knots.size() < 2) throw GridError("conditional_interpolation: need at least the knots 0 and T");
  std::vector<Eigen::Index> index;
  for (double k : knots) index.push_back(grid_index(path, k));
  if (index.front() != 0 || index.back() != path.intervals())
    throw GridError("conditional_interpolation: knots must include 0 and T");
  for (std::size_t j = 1; j < index.size(); ++j)
    if (index[j] <= index[j - 1]) throw GridError("conditional_interpolation: knots must increase strictly");

  Eigen::MatrixXd out(path.points(), path.dim());
  for (std::size_t j = 0; j + 1 < index.size(); ++j) {
    const Eigen::Index a = index[j], b = index[j + 1];
    out.row(b) = path.values().row(b);
    for (Eigen::Index i = a; i < b; ++i) {
      const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
      out.row(i) = path.values().row(a) + w * (path.values().row(b) - path.values().row(a));
    }
  }
  return GridPath(path.horizon(), std::move(out));
}

}  // namespace fqrp
