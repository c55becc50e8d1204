#pragma once

#include <Eigen/Dense>

#include <vector>

namespace fqrp {

/// Integral bit allocation: level counts N_1 >= ... >= N_L >= 2 (trailing
/// ones are implicit) for independent Gaussian coordinates with decreasing
/// variances, under the product budget prod N_k <= budget.
struct BitAllocation {
  long budget = 1;
  std::vector<int> levels;
  /// sum_{k<=L} var_k * dist(N_k) + (total variance - sum_{k<=L} var_k)
  double distortion = 0.0;

  int active() const { return static_cast<int>(levels.size()); }
  long achieved_size() const;
};

/// Squared error of an allocation (levels may be given in any order and may
/// contain ones). variances must cover every entry of levels.
double allocation_distortion(const std::vector<int>& levels, const Eigen::VectorXd& variances,
                             double total_variance);

/// Minimizes the exact product distortion.
///
/// variances must be sorted in decreasing order; total_variance is the sum
/// over all coordinates including any not listed (the Brownian tail). The
/// search relaxes to real-valued levels (water-filling on log N_k), rounds,
/// improves the incumbent by local moves, then certifies it with a
/// branch-and-bound pass over non-increasing level sequences that prunes
/// against the incumbent.
BitAllocation allocate_bits(const Eigen::VectorXd& variances, double total_variance, long budget);

/// True when no single move N_k -> N_k +- 1 and no transfer between two
/// coordinates that keeps the product within budget lowers the distortion.
bool is_locally_optimal(const BitAllocation& alloc, const Eigen::VectorXd& variances, double total_variance);

}  // namespace fqrp
