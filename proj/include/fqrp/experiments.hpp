#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fqrp/qsde.hpp"

namespace fqrp {

/// Median and quartiles of a sample.
struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
Quartiles quartiles(std::vector<double> sample);

/// One row of the exact quadratic rate table.
struct QuadraticRateRow {
  long budget;
  double error;       // sqrt(distortion)
  double normalized;  // error * sqrt(log N) / T
};
std::vector<QuadraticRateRow> quadratic_rate_table(const std::vector<long>& budgets, double horizon);

struct ExperimentSettings {
  double horizon = 1.0;
  double q = 2.5;
  Eigen::Index intervals = 4096;
  int paths = 200;
  std::uint64_t seed = 1;
  /// When set (p >= 2, grid <= 4096 intervals), delta_p is recorded as well.
  std::optional<double> p;
};

/// Distances between W and its product quantization Ŵ^N, per budget.
struct HolderRateRow {
  long budget;
  Quartiles level1;  // ||W - Ŵ||_{q,Hol}
  Quartiles level2;  // ||A^W - A^Ŵ||_{q/2,Hol}
  Quartiles rho;
  Quartiles sup;     // sup_t |W_t - Ŵ_t|
  std::optional<Quartiles> delta;
};

/// For every path (the same paths for every budget): simulate, project,
/// lift both paths, and record the distances.
std::vector<HolderRateRow> holder_rate_experiment(const std::vector<long>& budgets, int dim,
                                                  const ExperimentSettings& settings);

struct ConvergenceRow {
  long budget;
  Quartiles rho;  // rho_q(X̃^N, X)
  Quartiles sup;  // sup_t |X̃^N_t - X_t|
  std::optional<Quartiles> delta;
};

/// For each path: project W, solve the cell ODE and the reference SDE on the
/// same grid, lift both solutions, and record rho_q.
std::vector<ConvergenceRow> pathwise_convergence_experiment(const SDESpec& spec, const std::vector<long>& budgets,
                                                            const ExperimentSettings& settings);

/// Seed of Monte Carlo path i for a given experiment seed.
std::uint64_t path_seed(std::uint64_t seed, std::size_t path);

}  // namespace fqrp
