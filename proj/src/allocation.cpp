#include "fqrp/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "fqrp/errors.hpp"
#include "fqrp/scalar_quant.hpp"

namespace fqrp {

namespace {

/// Sizes above this are only ever bounded, never solved, unless a branch
/// survives pruning with them.
constexpr int kBoundOnlyAbove = 256;

int floor_log2(long n) {
  int r = 0;
  while (n >= 2) {
    n /= 2;
    ++r;
  }
  return r;
}

/// m^2 * dist(m) >= 1 for the normal distribution (it increases from 1 at m = 1
/// towards the Zador constant), so 1/m^2 is a valid lower bound.
double distortion_lower_bound(long m) {
  if (m <= 1) return 1.0;
  if (m <= kBoundOnlyAbove) return scalar_distortion(static_cast<int>(m));
  return 1.0 / (static_cast<double>(m) * static_cast<double>(m));
}

long product(const std::vector<int>& levels) {
  long p = 1;
  for (int n : levels) p *= n;
  return p;
}

void normalize(std::vector<int>& levels) {
  std::sort(levels.begin(), levels.end(), std::greater<>());
  while (!levels.empty() && levels.back() <= 1) levels.pop_back();
}

/// Real-valued optimum of sum v_k / N_k^2 under sum log N_k <= log budget,
/// rounded down, then grown greedily while the budget allows.
std::vector<int> relaxed_start(const Eigen::VectorXd& variances, long budget, int max_active) {
  std::vector<double> real_levels;
  for (int active = max_active; active >= 1; --active) {
    double log_geo = 0.0;
    for (int k = 0; k < active; ++k) log_geo += std::log(variances[k]);
    log_geo /= active;
    const double log_budget = std::log(static_cast<double>(budget)) / active;
    std::vector<double> trial(active);
    for (int k = 0; k < active; ++k) trial[k] = std::exp(log_budget + 0.5 * (std::log(variances[k]) - log_geo));
    if (trial.back() >= 1.0) {
      real_levels = std::move(trial);
      break;
    }
  }
  std::vector<int> levels;
  for (double x : real_levels) levels.push_back(std::max(1, static_cast<int>(std::floor(x))));
  bool grown = true;
  while (grown) {
    grown = false;
    int best = -1;
    double best_gain = 0.0;
    const long p = product(levels);
    for (int k = 0; k < static_cast<int>(levels.size()); ++k) {
      if ((p / levels[k]) * (levels[k] + 1) > budget) continue;
      const double gain = variances[k] * (scalar_distortion(levels[k]) - scalar_distortion(levels[k] + 1));
      if (gain > best_gain) {
        best_gain = gain;
        best = k;
      }
    }
    if (best >= 0) {
      ++levels[best];
      grown = true;
    }
  }
  normalize(levels);
  return levels;
}

/// Neighbours of an allocation: single +-1 moves, opening a new coordinate
/// at 2, and transfers (+1 on one coordinate, the other lowered to the
/// largest size that fits).
std::vector<std::vector<int>> neighbours(const std::vector<int>& levels, long budget, int max_active) {
  std::vector<std::vector<int>> out;
  const int n = static_cast<int>(levels.size());
  const long p = product(levels);
  for (int k = 0; k < n; ++k) {
    auto up = levels;
    ++up[k];
    if (product(up) <= budget) out.push_back(up);
    auto down = levels;
    --down[k];
    out.push_back(down);
  }
  if (n < max_active && 2 * p <= budget) {
    auto grow = levels;
    grow.push_back(2);
    out.push_back(grow);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      auto moved = levels;
      ++moved[i];
      const long rest = product(moved) / moved[j];
      const int fit = static_cast<int>(budget / rest);
      if (fit < 1 || fit >= levels[j]) continue;
      moved[j] = fit;
      out.push_back(moved);
    }
  }
  for (auto& candidate : out) normalize(candidate);
  return out;
}

struct BranchAndBound {
  const Eigen::VectorXd& variances;
  double total;
  long budget;
  int max_active;
  std::vector<double> prefix_variance;  // sum of the first k variances
  std::vector<int> best;
  double best_value;
  std::vector<int> current;

  /// Lower bound on sum_{k >= from} v_k dist(N_k) over N_k <= cap with
  /// prod N_k <= remaining, from dist(N) >= 1/N^2: minimize sum v_k x_k over
  /// x_k in [1/cap^2, 1] with prod x_k >= remaining^-2. The optimum is
  /// x_k = clamp(mu / v_k), mu found by bisection on log mu.
  double relaxed_tail_bound(int from, long remaining, long cap) const {
    if (from >= max_active) return 0.0;
    const double lo_x = 1.0 / (static_cast<double>(cap) * static_cast<double>(cap));
    const double need = -2.0 * std::log(static_cast<double>(remaining));
    auto log_product = [&](double mu) {
      double s = 0.0;
      for (int k = from; k < max_active; ++k) s += std::log(std::clamp(mu / variances[k], lo_x, 1.0));
      return s;
    };
    if (log_product(variances[max_active - 1] * lo_x) >= need) {
      double v = 0.0;
      for (int k = from; k < max_active; ++k) v += variances[k] * lo_x;
      return v;
    }
    double a = std::log(variances[max_active - 1] * lo_x), b = std::log(variances[from]);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      (log_product(std::exp(mid)) >= need ? b : a) = mid;
    }
    // b is feasible; the value at a feasible point of the relaxation is only
    // an upper bound, so use the dual value at a instead.
    const double mu = std::exp(a);
    double v = 0.0, logs = 0.0;
    for (int k = from; k < max_active; ++k) {
      const double x = std::clamp(mu / variances[k], lo_x, 1.0);
      v += variances[k] * x;
      logs += std::log(x);
    }
    // Lagrangian lower bound: L(mu) = sum v_k x_k + mu (need - sum log x_k).
    return std::max(0.0, v + mu * (need - logs));
  }

  void search(int position, long remaining, int cap, double partial) {
    // Stopping here leaves coordinates >= position at one level.
    const double stop_value = partial + (total - prefix_variance[position]);
    if (stop_value < best_value) {
      best_value = stop_value;
      best = current;
    }
    if (position >= max_active || remaining < 2) return;
    for (long m = std::min<long>(cap, remaining); m >= 2; --m) {
      // Positions after this one can only use sizes <= m, and at most
      // floor(log2(remaining / m)) of them can exceed one level.
      const int slots = std::min(max_active - position - 1, floor_log2(remaining / m));
      const double tail_bound = distortion_lower_bound(m) *
                                (prefix_variance[position + 1 + slots] - prefix_variance[position + 1]);
      const double here_bound = variances[position] * distortion_lower_bound(m);
      const double untouched = total - prefix_variance[position + 1 + slots];
      if (partial + here_bound + tail_bound + untouched >= best_value) continue;
      const double relaxed = relaxed_tail_bound(position + 1, remaining / m, m);
      if (partial + here_bound + relaxed + (total - prefix_variance[max_active]) >= best_value) continue;
      const double here = variances[position] * scalar_distortion(static_cast<int>(m));
      current.push_back(static_cast<int>(m));
      search(position + 1, remaining / m, static_cast<int>(m), partial + here);
      current.pop_back();
    }
  }
};

}  // namespace

long BitAllocation::achieved_size() const { return product(levels); }

double allocation_distortion(const std::vector<int>& levels, const Eigen::VectorXd& variances,
                             double total_variance) {
  double covered = 0.0;
  double error = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 1) throw DomainError("allocation_distortion: level counts must be >= 1");
    if (static_cast<Eigen::Index>(k) >= variances.size())
      throw DomainError("allocation_distortion: more levels than variances");
    covered += variances[k];
    error += variances[k] * scalar_distortion(levels[k]);
  }
  return error + (total_variance - covered);
}

BitAllocation allocate_bits(const Eigen::VectorXd& variances, double total_variance, long budget) {
  if (budget < 1) throw DomainError("allocate_bits: budget must be >= 1");
  for (Eigen::Index k = 0; k < variances.size(); ++k) {
    if (!(variances[k] > 0.0)) throw DomainError("allocate_bits: variances must be positive");
    if (k > 0 && variances[k] > variances[k - 1]) throw DomainError("allocate_bits: variances must be decreasing");
  }
  BitAllocation alloc;
  alloc.budget = budget;
  const int max_active = std::min<int>(static_cast<int>(variances.size()), floor_log2(budget));
  if (max_active == 0) {
    alloc.distortion = total_variance;
    return alloc;
  }

  std::vector<int> incumbent = relaxed_start(variances, budget, max_active);
  double incumbent_value = allocation_distortion(incumbent, variances, total_variance);
  for (bool improved = true; improved;) {
    improved = false;
    for (const auto& candidate : neighbours(incumbent, budget, max_active)) {
      const double value = allocation_distortion(candidate, variances, total_variance);
      if (value < incumbent_value) {
        incumbent = candidate;
        incumbent_value = value;
        improved = true;
      }
    }
  }

  BranchAndBound bnb{variances, total_variance, budget, max_active, {}, incumbent, incumbent_value, {}};
  bnb.prefix_variance.assign(max_active + 2, 0.0);
  for (int k = 0; k < max_active; ++k) bnb.prefix_variance[k + 1] = bnb.prefix_variance[k] + variances[k];
  bnb.prefix_variance[max_active + 1] = bnb.prefix_variance[max_active];
  bnb.search(0, budget, static_cast<int>(std::min<long>(budget, std::numeric_limits<int>::max())), 0.0);

  alloc.levels = bnb.best;
  alloc.distortion = allocation_distortion(alloc.levels, variances, total_variance);
  return alloc;
}

bool is_locally_optimal(const BitAllocation& alloc, const Eigen::VectorXd& variances, double total_variance) {
  const int max_active = std::min<int>(static_cast<int>(variances.size()), floor_log2(alloc.budget));
  for (const auto& candidate : neighbours(alloc.levels, alloc.budget, max_active))
    if (allocation_distortion(candidate, variances, total_variance) < alloc.distortion) return false;
  return true;
}

}  // namespace fqrp
