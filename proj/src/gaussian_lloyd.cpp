#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fqrp/allocation.hpp"
#include "fqrp/errors.hpp"
#include "fqrp/parallel.hpp"
#include "fqrp/scalar_quant.hpp"

namespace fqrp {

namespace {

constexpr int kChunk = 10000;
constexpr std::uint64_t kEvaluationStream = 0xE7A1;

struct ChunkStats {
  Eigen::MatrixXd sums;
  Eigen::VectorXd counts;
  double squared_error = 0.0;
  double squared_error_sq = 0.0;
};

Eigen::Index nearest(const Eigen::MatrixXd& points, const Eigen::VectorXd& x, double& best) {
  Eigen::Index arg = 0;
  best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double d = (points.row(i).transpose() - x).squaredNorm();
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

/// One batch of batch_size samples split in fixed chunks with their own
/// sub-seeds; chunk results are reduced in chunk order.
ChunkStats run_batch(const Eigen::MatrixXd& points, const Eigen::VectorXd& stddev, std::uint64_t seed,
                     int batch_size) {
  const int chunks = (batch_size + kChunk - 1) / kChunk;
  std::vector<ChunkStats> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    ChunkStats& s = partial[c];
    s.sums = Eigen::MatrixXd::Zero(points.rows(), points.cols());
    s.counts = Eigen::VectorXd::Zero(points.rows());
    std::mt19937_64 rng(mix_seed(seed, c));
    std::normal_distribution<double> gauss;
    const int begin = static_cast<int>(c) * kChunk;
    const int end = std::min(batch_size, begin + kChunk);
    Eigen::VectorXd x(stddev.size());
    for (int k = begin; k < end; ++k) {
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = stddev[j] * gauss(rng);
      double d2;
      const Eigen::Index i = nearest(points, x, d2);
      s.sums.row(i) += x.transpose();
      s.counts[i] += 1.0;
      s.squared_error += d2;
      s.squared_error_sq += d2 * d2;
    }
  });
  ChunkStats total = std::move(partial[0]);
  for (int c = 1; c < chunks; ++c) {
    total.sums += partial[c].sums;
    total.counts += partial[c].counts;
    total.squared_error += partial[c].squared_error;
    total.squared_error_sq += partial[c].squared_error_sq;
  }
  return total;
}

/// Product codebook from the optimal allocation over the given variances.
Eigen::MatrixXd product_start(const Eigen::VectorXd& variances, int size, double& exact_distortion) {
  // Allocation works on decreasing variances; remember the permutation.
  std::vector<Eigen::Index> order(variances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return variances[a] > variances[b]; });
  Eigen::VectorXd sorted(variances.size());
  for (Eigen::Index k = 0; k < sorted.size(); ++k) sorted[k] = variances[order[k]];
  const BitAllocation alloc = allocate_bits(sorted, sorted.sum(), size);
  exact_distortion = alloc.distortion;

  const long count = alloc.achieved_size();
  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(count, variances.size());
  for (long cell = 0; cell < count; ++cell) {
    long rest = cell;
    for (int k = alloc.active() - 1; k >= 0; --k) {
      const int n = alloc.levels[k];
      const auto& q = optimal_scalar_quantizer(n);
      points(cell, order[k]) = std::sqrt(sorted[k]) * q.levels[rest % n];
      rest /= n;
    }
  }
  return points;
}

}  // namespace

GaussianDiagCodebook lloyd_gaussian_diag(const Eigen::VectorXd& variances, int size, std::uint64_t seed,
                                         int iterations) {
  if (variances.size() < 1) throw DomainError("lloyd_gaussian_diag: need at least one variance");
  if ((variances.array() <= 0.0).any()) throw DomainError("lloyd_gaussian_diag: variances must be positive");
  if (size < 1) throw DomainError("lloyd_gaussian_diag: size must be >= 1");
  if (iterations < 0) throw DomainError("lloyd_gaussian_diag: iterations must be >= 0");

  GaussianDiagCodebook cb;
  cb.variances = variances;
  if (size == 1) {
    // The mean is the optimal single point; its error is the total variance.
    cb.points = Eigen::MatrixXd::Zero(1, variances.size());
    cb.weights = Eigen::VectorXd::Ones(1);
    cb.distortion = cb.initial_distortion = variances.sum();
    return cb;
  }
  const Eigen::VectorXd stddev = variances.cwiseSqrt();
  Eigen::MatrixXd start = product_start(variances, size, cb.initial_distortion);
  if (start.rows() < size) {
    // Fill the unused budget with draws from the target distribution.
    const Eigen::Index have = start.rows();
    start.conservativeResize(size, Eigen::NoChange);
    std::mt19937_64 rng(mix_seed(seed, 0xF111));
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = have; i < size; ++i)
      for (Eigen::Index j = 0; j < start.cols(); ++j) start(i, j) = stddev[j] * gauss(rng);
  }

  const std::uint64_t eval_seed = mix_seed(seed, kEvaluationStream);
  auto score = [&](const Eigen::MatrixXd& points) { return run_batch(points, stddev, eval_seed, kLloydBatchSize); };

  Eigen::MatrixXd points = start;
  Eigen::MatrixXd best_points = start;
  ChunkStats best_stats = score(start);
  int best_iteration = 0;
  for (int it = 1; it <= iterations; ++it) {
    const ChunkStats batch = run_batch(points, stddev, mix_seed(seed, it), kLloydBatchSize);
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      if (batch.counts[i] > 0.0) points.row(i) = batch.sums.row(i) / batch.counts[i];
    ChunkStats stats = score(points);
    if (stats.squared_error < best_stats.squared_error) {
      best_stats = std::move(stats);
      best_points = points;
      best_iteration = it;
    }
  }

  const double m = kLloydBatchSize;
  cb.points = std::move(best_points);
  cb.weights = best_stats.counts / m;
  cb.distortion = best_stats.squared_error / m;
  const double var = std::max(0.0, best_stats.squared_error_sq / m - cb.distortion * cb.distortion);
  cb.standard_error = std::sqrt(var / m);
  cb.iterations = best_iteration;
  return cb;
}

}  // namespace fqrp
