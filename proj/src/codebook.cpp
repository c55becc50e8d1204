#include "fqrp/codebook.hpp"

#include <cmath>
#include <string>

#include "fqrp/errors.hpp"

namespace fqrp {

namespace {

/// Enough eigenvalues for any allocation: at most floor(log2 N) coordinates
/// can carry two or more levels.
int candidate_frequencies(long budget) {
  int r = 0;
  for (long n = budget; n >= 2; n /= 2) ++r;
  return std::max(r, 1);
}

void check_index(const ProductCodebook& cb, const MultiIndex& idx) {
  if (idx.size() != cb.index_length())
    throw IndexError("multi-index has length " + std::to_string(idx.size()) + ", expected " +
                     std::to_string(cb.index_length()));
  for (std::size_t pos = 0; pos < idx.size(); ++pos) {
    const int n = cb.allocation.levels[pos % cb.frequencies()];
    if (idx[pos] < 0 || idx[pos] >= n)
      throw IndexError("multi-index entry " + std::to_string(pos) + " = " + std::to_string(idx[pos]) +
                       " outside [0, " + std::to_string(n) + ")");
  }
}

}  // namespace

QuantizerPath::QuantizerPath(double horizon, Eigen::VectorXd lambda, Eigen::MatrixXd coefficients)
    : horizon_(horizon), lambda_(std::move(lambda)), coefficients_(std::move(coefficients)) {
  if (lambda_.size() != coefficients_.rows())
    throw CompatibilityError("QuantizerPath: one eigenvalue per coefficient row required");
  frequency_ = lambda_.cwiseSqrt().cwiseInverse();
}

QuantizerPath QuantizerPath::zero(double horizon, Eigen::Index dim) {
  return QuantizerPath(horizon, Eigen::VectorXd(0), Eigen::MatrixXd(0, dim));
}

Eigen::VectorXd QuantizerPath::value(double t) const {
  const Eigen::VectorXd basis = std::sqrt(2.0 / horizon_) * (t * frequency_).array().sin();
  return coefficients_.transpose() * basis;
}

Eigen::VectorXd QuantizerPath::derivative(double t) const {
  const Eigen::VectorXd basis =
      std::sqrt(2.0 / horizon_) * (frequency_.array() * (t * frequency_).array().cos());
  return coefficients_.transpose() * basis;
}

GridPath QuantizerPath::sample(Eigen::Index intervals) const {
  Eigen::MatrixXd values(intervals + 1, dim());
  for (Eigen::Index i = 0; i <= intervals; ++i)
    values.row(i) = value(horizon_ * static_cast<double>(i) / static_cast<double>(intervals)).transpose();
  return GridPath(horizon_, std::move(values));
}

long ProductCodebook::size() const {
  long s = 1;
  for (int c = 0; c < dim; ++c) s *= component_size();
  return s;
}

MultiIndex ProductCodebook::unflatten(long cell) const {
  if (cell < 0 || cell >= size()) throw IndexError("cell " + std::to_string(cell) + " out of range");
  MultiIndex idx(index_length());
  for (std::size_t pos = idx.size(); pos-- > 0;) {
    const int n = allocation.levels[pos % frequencies()];
    idx[pos] = static_cast<int>(cell % n);
    cell /= n;
  }
  return idx;
}

long ProductCodebook::flatten(const MultiIndex& idx) const {
  check_index(*this, idx);
  long cell = 0;
  for (std::size_t pos = 0; pos < idx.size(); ++pos) cell = cell * allocation.levels[pos % frequencies()] + idx[pos];
  return cell;
}

long integer_root(long n, int d) {
  if (n < 1 || d < 1) throw DomainError("integer_root: need n >= 1 and d >= 1");
  long r = static_cast<long>(std::floor(std::pow(static_cast<double>(n), 1.0 / d)));
  auto power = [d](long base) {
    long p = 1;
    for (int i = 0; i < d; ++i) p *= base;
    return p;
  };
  while (r > 1 && power(r) > n) --r;
  while (power(r + 1) <= n) ++r;
  return std::max(r, 1L);
}

BitAllocation optimal_bit_allocation(long budget, double horizon) {
  if (budget < 1) throw DomainError("optimal_bit_allocation: budget must be >= 1");
  if (!(horizon > 0.0)) throw DomainError("optimal_bit_allocation: horizon must be positive");
  const Eigen::VectorXd lambda = eigenvalues(candidate_frequencies(budget), horizon);
  return allocate_bits(lambda, 0.5 * horizon * horizon, budget);
}

ProductCodebook build_product_codebook(long budget, int dim, double horizon) {
  if (budget < 1) throw DomainError("build_product_codebook: budget must be >= 1");
  if (dim < 1) throw DomainError("build_product_codebook: dimension must be >= 1");
  ProductCodebook cb;
  cb.dim = dim;
  cb.horizon = horizon;
  cb.budget = budget;
  cb.allocation = optimal_bit_allocation(integer_root(budget, dim), horizon);
  cb.lambda = eigenvalues(cb.allocation.active(), horizon);
  for (int n : cb.allocation.levels) cb.quantizers.push_back(optimal_scalar_quantizer(n));
  return cb;
}

QuantizerPath elementary_path(const ProductCodebook& cb, const MultiIndex& idx) {
  check_index(cb, idx);
  const int L = cb.frequencies();
  Eigen::MatrixXd coefficients(L, cb.dim);
  for (int c = 0; c < cb.dim; ++c)
    for (int k = 0; k < L; ++k)
      coefficients(k, c) = cb.quantizers[k].levels[idx[c * L + k]] * std::sqrt(cb.lambda[k]);
  return QuantizerPath(cb.horizon, cb.lambda, std::move(coefficients));
}

MultiIndex voronoi_project(const GridPath& path, const ProductCodebook& cb) {
  if (path.dim() != cb.dim)
    throw CompatibilityError("voronoi_project: path has " + std::to_string(path.dim()) + " components, codebook " +
                             std::to_string(cb.dim));
  if (std::abs(path.horizon() - cb.horizon) > 1e-12 * cb.horizon)
    throw CompatibilityError("voronoi_project: path horizon differs from the codebook horizon");
  const int L = cb.frequencies();
  const Eigen::MatrixXd xi = kl_coefficients(path, L);
  MultiIndex idx(cb.index_length());
  for (int c = 0; c < cb.dim; ++c)
    for (int k = 0; k < L; ++k) idx[c * L + k] = static_cast<int>(quantize_scalar(xi(k, c), cb.quantizers[k]));
  return idx;
}

double cell_weight(const ProductCodebook& cb, const MultiIndex& idx) {
  check_index(cb, idx);
  const int L = cb.frequencies();
  double w = 1.0;
  for (std::size_t pos = 0; pos < idx.size(); ++pos) w *= cb.quantizers[pos % L].weights[idx[pos]];
  return w;
}

double codebook_distortion(const ProductCodebook& cb) { return cb.dim * cb.allocation.distortion; }

Eigen::VectorXd quantized_wiener_integral(const ProductCodebook& cb, const MultiIndex& idx,
                                          const Eigen::VectorXd& phi, double t) {
  if (phi.size() < 2) throw GridError("quantized_wiener_integral: integrand needs at least two grid values");
  const QuantizerPath alpha = elementary_path(cb, idx);
  const Eigen::Index n = phi.size() - 1;
  const double h = cb.horizon / static_cast<double>(n);
  const double x = t / h;
  const Eigen::Index last = static_cast<Eigen::Index>(std::round(x));
  if (std::abs(x - static_cast<double>(last)) > 1e-9 * std::max(1.0, x) || last < 0 || last > n)
    throw GridError("quantized_wiener_integral: t is not a grid point");

  // Trapezoid rule on phi(s) * alpha'(s) over [0, t].
  Eigen::VectorXd out = Eigen::VectorXd::Zero(cb.dim);
  for (Eigen::Index i = 0; i <= last; ++i) {
    const double w = (i == 0 || i == last) ? 0.5 * h : h;
    out += (w * phi[i]) * alpha.derivative(h * static_cast<double>(i));
  }
  if (last == 0) out.setZero();
  return out;
}

}  // namespace fqrp
