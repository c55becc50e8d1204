#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fqrp/allocation.hpp"
#include "fqrp/codebook.hpp"
#include "fqrp/errors.hpp"
#include "fqrp/kl.hpp"
#include "fqrp/scalar_quant.hpp"
#include "oracles.hpp"

namespace fqrp {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> brownian_variances(long budget, double T) {
  std::vector<double> v;
  for (long m = 2; m <= budget; m *= 2) v.push_back(eigenvalue(static_cast<int>(v.size()) + 1, T));
  return v;
}

TEST(AllocationTest, SingleCellUsesNothing) {
  const BitAllocation a = optimal_bit_allocation(1, 1.0);
  EXPECT_TRUE(a.levels.empty());
  EXPECT_DOUBLE_EQ(a.distortion, 0.5);
  EXPECT_EQ(a.achieved_size(), 1);
}

TEST(AllocationTest, TwoCellsQuantizeTheFirstFrequency) {
  const BitAllocation a = optimal_bit_allocation(2, 1.0);
  ASSERT_EQ(a.levels, std::vector<int>{2});
  const double lam1 = 4.0 / (kPi * kPi);
  EXPECT_NEAR(a.distortion, lam1 * (1.0 - 2.0 / kPi) + (0.5 - lam1), 1e-14);
  EXPECT_NEAR(a.distortion, 0.241996, 1e-5);
}

TEST(AllocationTest, MatchesBruteForce) {
  for (long budget : {3L, 6L, 12L, 30L, 64L, 96L}) {
    const BitAllocation a = optimal_bit_allocation(budget, 1.0);
    const double brute = oracle::brute_force_allocation(budget, brownian_variances(budget, 1.0), 0.5,
                                                        [](int m) { return scalar_distortion(m); });
    EXPECT_NEAR(a.distortion, brute, 1e-15) << budget;
    EXPECT_LE(a.achieved_size(), budget);
  }
}

TEST(AllocationTest, ResultIsLocallyOptimalAndNonIncreasing) {
  for (long budget : {10L, 100L, 1000L, 10000L}) {
    const BitAllocation a = optimal_bit_allocation(budget, 1.0);
    const Eigen::VectorXd lam = eigenvalues(static_cast<int>(brownian_variances(budget, 1.0).size()), 1.0);
    EXPECT_TRUE(is_locally_optimal(a, lam, 0.5)) << budget;
    for (std::size_t k = 1; k < a.levels.size(); ++k) EXPECT_LE(a.levels[k], a.levels[k - 1]);
    EXPECT_NEAR(a.distortion, allocation_distortion(a.levels, lam, 0.5), 1e-15);
  }
}

TEST(AllocationTest, GenericVariances) {
  Eigen::VectorXd v(4);
  v << 3.0, 1.0, 0.5, 0.1;
  const BitAllocation a = allocate_bits(v, 4.6, 40);
  const double brute = oracle::brute_force_allocation(40, {3.0, 1.0, 0.5, 0.1}, 4.6,
                                                      [](int m) { return scalar_distortion(m); });
  EXPECT_NEAR(a.distortion, brute, 1e-15);
  EXPECT_THROW(allocate_bits(v, 4.6, 0), DomainError);
}

TEST(ProductCodebookTest, SizesAndRoots) {
  EXPECT_EQ(integer_root(64, 3), 4);
  EXPECT_EQ(integer_root(63, 3), 3);
  EXPECT_EQ(integer_root(1000, 1), 1000);
  EXPECT_EQ(integer_root(1000000, 2), 1000);
  const ProductCodebook cb = build_product_codebook(100, 2, 1.0);
  EXPECT_EQ(cb.budget, 100);
  EXPECT_EQ(cb.allocation.budget, 10);
  EXPECT_LE(cb.size(), 100);
  EXPECT_EQ(cb.size(), cb.component_size() * cb.component_size());
  EXPECT_EQ(cb.index_length(), 2u * cb.frequencies());
  for (long c = 0; c < cb.size(); ++c) EXPECT_EQ(cb.flatten(cb.unflatten(c)), c);
  EXPECT_THROW(build_product_codebook(0, 1, 1.0), DomainError);
  EXPECT_THROW(build_product_codebook(4, 0, 1.0), DomainError);
}

TEST(ProductCodebookTest, WeightsSumToOne) {
  for (int d : {1, 2, 3}) {
    const ProductCodebook cb = build_product_codebook(200, d, 1.5);
    double total = 0.0;
    for (long c = 0; c < cb.size(); ++c) total += cell_weight(cb, cb.unflatten(c));
    EXPECT_NEAR(total, 1.0, 1e-10) << d;
  }
}

TEST(ElementaryPathTest, TwoPointCodebook) {
  const ProductCodebook cb = build_product_codebook(2, 1, 1.0);
  ASSERT_EQ(cb.size(), 2);
  const QuantizerPath up = elementary_path(cb, {1});
  const QuantizerPath down = elementary_path(cb, {0});
  const double expected = std::sqrt(2.0 / kPi) * (2.0 / kPi) * std::sqrt(2.0);
  EXPECT_NEAR(up.value(1.0)[0], expected, 1e-12);
  EXPECT_NEAR(up.value(1.0)[0], 0.718, 1e-3);
  EXPECT_NEAR(down.value(0.4)[0], -up.value(0.4)[0], 1e-15);
  EXPECT_EQ(up.value(0.0)[0], 0.0);
}

TEST(ElementaryPathTest, MedianIndicesGiveZeroPath) {
  // Budget 3 with d=1 quantizes the first frequency with three levels.
  const ProductCodebook cb = build_product_codebook(3, 1, 1.0);
  ASSERT_EQ(cb.allocation.levels, std::vector<int>{3});
  const QuantizerPath p = elementary_path(cb, {1});
  for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(p.value(t)[0], 0.0, 1e-15);
  EXPECT_THROW(elementary_path(cb, {3}), IndexError);
  EXPECT_THROW(elementary_path(cb, {0, 0}), IndexError);
}

TEST(ElementaryPathTest, DerivativeMatchesFiniteDifference) {
  const ProductCodebook cb = build_product_codebook(500, 2, 2.0);
  const QuantizerPath p = elementary_path(cb, cb.unflatten(cb.size() / 3));
  const double h = 1e-6;
  for (double t : {0.3, 1.1, 1.9}) {
    const Eigen::VectorXd fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
    EXPECT_TRUE(fd.isApprox(p.derivative(t), 1e-7));
  }
}

TEST(VoronoiTest, ElementaryPathProjectsToItself) {
  const ProductCodebook cb = build_product_codebook(50, 1, 1.0);
  for (long c = 0; c < cb.size(); ++c) {
    const MultiIndex idx = cb.unflatten(c);
    EXPECT_EQ(voronoi_project(elementary_path(cb, idx).sample(1024), cb), idx);
  }
}

TEST(VoronoiTest, TwoPointCellFrequencies) {
  const ProductCodebook cb = build_product_codebook(2, 1, 1.0);
  const int paths = 2000;
  int up = 0;
  for (int i = 0; i < paths; ++i) up += voronoi_project(simulate_brownian(256, 1, 1.0, 40 + i), cb)[0];
  EXPECT_LT(std::abs(up / double(paths) - 0.5), 4 * 0.5 / std::sqrt(paths));
}

TEST(VoronoiTest, CoordinateProjectionIsGlobalNearest) {
  const ProductCodebook cb = build_product_codebook(16, 1, 1.0);
  const Eigen::Index n = 512;
  std::vector<GridPath> codes;
  for (long c = 0; c < cb.size(); ++c) codes.push_back(elementary_path(cb, cb.unflatten(c)).sample(n));
  for (int i = 0; i < 100; ++i) {
    const GridPath w = simulate_brownian(n, 1, 1.0, 700 + i);
    const MultiIndex idx = voronoi_project(w, cb);
    // L^2 distance in K-L coordinates over all cells (the tail is common).
    const Eigen::MatrixXd xi = kl_coefficients(w, cb.frequencies());
    long best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (long c = 0; c < cb.size(); ++c) {
      const Eigen::MatrixXd xc = kl_coefficients(codes[c], cb.frequencies());
      const double dist = (xi - xc).squaredNorm();
      if (dist < best_dist) best_dist = dist, best = c;
    }
    EXPECT_EQ(cb.flatten(idx), best) << i;
  }
}

TEST(VoronoiTest, RejectsDimensionMismatch) {
  const ProductCodebook cb = build_product_codebook(16, 2, 1.0);
  EXPECT_THROW(voronoi_project(simulate_brownian(64, 1, 1.0, 1), cb), CompatibilityError);
  EXPECT_THROW(voronoi_project(simulate_brownian(64, 2, 2.0, 1), cb), CompatibilityError);
}

TEST(DistortionTest, MatchesMonteCarlo) {
  const ProductCodebook cb = build_product_codebook(64, 1, 1.0);
  const Eigen::Index n = 1024;
  std::vector<double> err;
  for (int i = 0; i < 2000; ++i) {
    const GridPath w = simulate_brownian(n, 1, 1.0, 3000 + i);
    const GridPath q = elementary_path(cb, voronoi_project(w, cb)).sample(n);
    const Eigen::VectorXd diff = w.values().col(0) - q.values().col(0);
    err.push_back(w.step() * (diff.squaredNorm() - 0.5 * diff[n] * diff[n]));
  }
  const auto [m, se] = oracle::mean_se(err);
  // The grid itself adds roughly T h / 6 of squared error.
  EXPECT_LT(std::abs(m - codebook_distortion(cb)), 4 * se + 1.0 / (6.0 * n));
}

TEST(DistortionTest, ScalesWithDimensionAndHorizon) {
  EXPECT_NEAR(codebook_distortion(build_product_codebook(1, 3, 1.0)), 1.5, 1e-15);
  const double d1 = codebook_distortion(build_product_codebook(30, 1, 1.0));
  EXPECT_NEAR(codebook_distortion(build_product_codebook(30, 1, 2.0)), 4.0 * d1, 1e-13);
  EXPECT_NEAR(codebook_distortion(build_product_codebook(900, 2, 1.0)), 2.0 * d1, 1e-15);
}

TEST(DistortionTest, RateConstantNearOneHalf) {
  for (long budget : {10L, 100L, 1000L, 10000L}) {
    const double c = std::sqrt(codebook_distortion(build_product_codebook(budget, 1, 1.0)) * std::log(double(budget)));
    EXPECT_GE(c, 0.40) << budget;
    EXPECT_LE(c, 0.60) << budget;
  }
}

TEST(DistortionTest, StrictlyDecreasingInPowersOfTwo) {
  double previous = std::numeric_limits<double>::infinity();
  for (long budget = 2; budget <= 8192; budget *= 2) {
    const double d = codebook_distortion(build_product_codebook(budget, 1, 1.0));
    EXPECT_LT(d, previous) << budget;
    previous = d;
  }
}

TEST(StationarityTest, CellMeansOfCoefficientsMatchLevels) {
  const ProductCodebook cb = build_product_codebook(8, 1, 1.0);
  const int K = cb.frequencies();
  std::vector<std::vector<std::vector<double>>> by_cell(K);
  for (int k = 0; k < K; ++k) by_cell[k].resize(cb.quantizers[k].size());
  for (int i = 0; i < 4000; ++i) {
    const GridPath w = simulate_brownian(512, 1, 1.0, 50000 + i);
    const Eigen::MatrixXd xi = kl_coefficients(w, K);
    const MultiIndex idx = voronoi_project(w, cb);
    for (int k = 0; k < K; ++k) by_cell[k][idx[k]].push_back(xi(k, 0));
  }
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < cb.quantizers[k].size(); ++j) {
      const auto [m, se] = oracle::mean_se(by_cell[k][j]);
      EXPECT_LT(std::abs(m - cb.quantizers[k].levels[j]), 4 * se) << k << "," << j;
    }
  }
}

TEST(WienerIntegralTest, ConstantIntegrandGivesThePath) {
  const ProductCodebook cb = build_product_codebook(40, 2, 1.0);
  const MultiIndex idx = cb.unflatten(17);
  const QuantizerPath p = elementary_path(cb, idx);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(2049);
  for (double t : {0.25, 1.0}) EXPECT_TRUE(quantized_wiener_integral(cb, idx, one, t).isApprox(p.value(t), 1e-6));
  EXPECT_TRUE(quantized_wiener_integral(cb, idx, Eigen::VectorXd::Zero(2049), 1.0).isZero(0.0));
}

TEST(WienerIntegralTest, CosineIntegrandPicksOutTheLevel) {
  // With phi_k(s) = cos(s / sqrt(lambda_k)), int_0^T phi_k^2 = T / 2, so the
  // integral is sqrt(2/T) (c_k / sqrt(lambda_k)) T / 2 = sqrt(T/2) beta_k.
  const double T = 1.0;
  const ProductCodebook cb = build_product_codebook(2, 1, T);
  const int n = 4096;
  Eigen::VectorXd phi(n + 1);
  for (int i = 0; i <= n; ++i) phi[i] = std::cos(T * i / n / std::sqrt(cb.lambda[0]));
  const double beta = cb.quantizers[0].levels[1];
  EXPECT_NEAR(quantized_wiener_integral(cb, {1}, phi, T)[0], std::sqrt(T / 2) * beta, 1e-7);
  EXPECT_THROW(quantized_wiener_integral(cb, {1}, phi, 0.3), GridError);
}

}  // namespace
}  // namespace fqrp
