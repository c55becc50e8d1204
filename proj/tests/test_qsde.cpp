#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fqrp/codebook.hpp"
#include "fqrp/errors.hpp"
#include "fqrp/experiments.hpp"
#include "fqrp/kl.hpp"
#include "fqrp/parallel.hpp"
#include "fqrp/qsde.hpp"
#include "oracles.hpp"

namespace fqrp {
namespace {

SDESpec scalar_spec(double a, double sigma, Calculus calculus, bool analytic_jacobian) {
  SDESpec s;
  s.drift = [a](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };
  s.diffusion = [sigma](double, const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, sigma * x[0]); };
  if (analytic_jacobian)
    s.jacobian = [sigma](double, const Eigen::VectorXd&, int) { return Eigen::MatrixXd::Constant(1, 1, sigma); };
  s.x0 = Eigen::VectorXd::Ones(1);
  s.calculus = calculus;
  return s;
}

SDESpec additive_spec(Calculus calculus) {
  SDESpec s;
  s.dim = 2;
  s.noise_dim = 2;
  s.drift = [](double t, const Eigen::VectorXd& x) { return Eigen::VectorXd(-x + Eigen::Vector2d(t, 0.0)); };
  s.diffusion = [](double, const Eigen::VectorXd&) {
    Eigen::MatrixXd m(2, 2);
    m << 0.4, 0.1, 0.0, 0.3;
    return m;
  };
  s.x0 = Eigen::Vector2d(1.0, -0.5);
  s.calculus = calculus;
  return s;
}

TEST(ConversionTest, GeometricBrownianCorrection) {
  for (bool analytic : {true, false}) {
    const SDESpec strat = ito_to_stratonovich(scalar_spec(0.0, 0.3, Calculus::Ito, analytic));
    EXPECT_EQ(strat.calculus, Calculus::Stratonovich);
    for (double x : {-2.0, 0.5, 3.0}) {
      const double b = strat.drift(0.2, Eigen::VectorXd::Constant(1, x))[0];
      EXPECT_NEAR(b, -0.5 * 0.09 * x, analytic ? 1e-15 : 1e-8);
    }
  }
}

TEST(ConversionTest, ConstantDiffusionAndRoundTrip) {
  const SDESpec ito = additive_spec(Calculus::Ito);
  const SDESpec strat = ito_to_stratonovich(ito);
  const Eigen::Vector2d x(0.3, -1.2);
  EXPECT_TRUE(strat.drift(0.5, x).isApprox(ito.drift(0.5, x), 1e-12));
  const SDESpec back = ito_to_stratonovich(stratonovich_to_ito(make_spec("cubic")));
  const SDESpec cubic = make_spec("cubic");
  for (double v : {-1.0, 0.2, 2.0}) {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, v);
    EXPECT_NEAR(back.drift(0.0, p)[0], cubic.drift(0.0, p)[0], 1e-8);
  }
  EXPECT_THROW(ito_to_stratonovich(strat), DomainError);
  EXPECT_THROW(stratonovich_to_ito(ito), DomainError);
}

TEST(ElementaryOdeTest, LinearSpecHasClosedForm) {
  const ProductCodebook cb = build_product_codebook(2, 1, 1.0);
  const SDESpec gbm = gbm_spec(0.3, 1.0);
  for (long c = 0; c < cb.size(); ++c) {
    const QuantizerPath driver = elementary_path(cb, cb.unflatten(c));
    const GridPath x = solve_elementary_ode(gbm, driver, 1000);
    double worst = 0.0;
    for (Eigen::Index i = 0; i <= 1000; ++i)
      worst = std::max(worst, std::abs(x.values()(i, 0) - std::exp(0.3 * driver.value(x.time(i))[0])));
    EXPECT_LT(worst, 1e-6);
  }
}

TEST(ElementaryOdeTest, ZeroDriverAndZeroDiffusion) {
  const GridPath still = solve_elementary_ode(gbm_spec(0.5, 2.0), QuantizerPath::zero(1.0, 1), 10);
  for (Eigen::Index i = 0; i <= 10; ++i) EXPECT_EQ(still.values()(i, 0), 2.0);
  const SDESpec decay = make_spec("zero-diffusion");
  const ProductCodebook cb = build_product_codebook(20, 1, 1.0);
  const GridPath first = solve_elementary_ode(decay, elementary_path(cb, cb.unflatten(0)), 200);
  for (long c = 1; c < cb.size(); ++c)
    EXPECT_EQ(solve_elementary_ode(decay, elementary_path(cb, cb.unflatten(c)), 200).values(), first.values());
  EXPECT_NEAR(first.values()(200, 0), decay.x0[0] * std::exp(-1.0), 1e-10);
}

TEST(ElementaryOdeTest, BlowUpReportsTime) {
  SDESpec s;
  s.drift = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square()); };
  s.diffusion = [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); };
  s.x0 = Eigen::VectorXd::Ones(1);
  try {
    solve_elementary_ode(s, QuantizerPath::zero(2.0, 1), 400);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.time(), 0.9);
    EXPECT_LE(e.time(), 2.0);
  }
  EXPECT_THROW(solve_elementary_ode(s, QuantizerPath::zero(2.0, 1), 1), DomainError);
}

TEST(ReferenceSdeTest, GeometricBrownianPathwise) {
  const SDESpec gbm = gbm_spec(0.3, 1.0);
  std::vector<double> gaps;
  for (int p = 0; p < 200; ++p) {
    const GridPath w = simulate_brownian(1 << 14, 1, 1.0, 80 + p);
    const GridPath x = solve_reference_sde(gbm, w);
    const double exact = std::exp(0.3 * w.values()(1 << 14, 0));
    gaps.push_back(std::abs(x.values()(1 << 14, 0) - exact) / exact);
  }
  EXPECT_LT(quartiles(gaps).median, 0.01);
}

TEST(ReferenceSdeTest, GeometricBrownianMean) {
  const SDESpec gbm = gbm_spec(0.3, 1.0);
  std::vector<double> terminal;
  for (int p = 0; p < 10000; ++p) terminal.push_back(solve_reference_sde(gbm, simulate_brownian(128, 1, 1.0, 10 + p)).values()(128, 0));
  const auto [m, se] = oracle::mean_se(terminal);
  EXPECT_LT(std::abs(m - std::exp(0.045)), 3 * se);
}

TEST(ReferenceSdeTest, DeterministicCaseMatchesOde) {
  const SDESpec decay = make_spec("zero-diffusion");
  const GridPath w = simulate_brownian(1000, 1, 1.0, 4);
  const GridPath heun = solve_reference_sde(decay, w);
  const GridPath rk = solve_elementary_ode(decay, QuantizerPath::zero(1.0, 1), 1000);
  EXPECT_LT((heun.values() - rk.values()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(solve_reference_sde(decay, simulate_brownian(10, 2, 1.0, 1)), CompatibilityError);
}

TEST(EnsembleTest, WeightsAndSizes) {
  const SDESpec gbm = gbm_spec(0.3, 1.0);
  const ProductCodebook one = build_product_codebook(1, 1, 1.0);
  const QuantizedSolution single = quantized_sde_ensemble(gbm, one, 100);
  ASSERT_EQ(single.members.size(), 1u);
  EXPECT_EQ(single.members[0].weight, 1.0);
  const QuantizedSolution two = quantized_sde_ensemble(gbm, build_product_codebook(2, 1, 1.0), 100);
  ASSERT_EQ(two.members.size(), 2u);
  EXPECT_NEAR(two.members[0].weight, 0.5, 1e-15);
  EXPECT_NEAR(two.members[1].weight, 0.5, 1e-15);
  const ProductCodebook big = build_product_codebook(1000, 1, 1.0);
  const QuantizedSolution many = quantized_sde_ensemble(gbm, big, 64);
  EXPECT_EQ(static_cast<long>(many.members.size()), big.size());
  double total = 0.0;
  for (const auto& m : many.members) total += m.weight;
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_NEAR(quantized_expectation(many, [](const GridPath&) { return 1.0; }), 1.0, 1e-10);
}

TEST(EnsembleTest, SymmetricCodebookGivesZeroMeanForIdentityMap) {
  SDESpec identity;
  identity.drift = [](double, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1); };
  identity.diffusion = [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  identity.x0 = Eigen::VectorXd::Zero(1);
  const QuantizedSolution sol = quantized_sde_ensemble(identity, build_product_codebook(60, 1, 1.0), 256);
  EXPECT_NEAR(quantized_expectation(sol, [](const GridPath& x) { return x.values()(x.intervals(), 0); }), 0.0, 1e-12);
}

TEST(EnsembleTest, GbmCubatureImprovesWithBudget) {
  const SDESpec gbm = gbm_spec(0.3, 1.0);
  const double exact = std::exp(0.045);
  double previous = std::numeric_limits<double>::infinity();
  for (long budget : {10L, 100L, 1000L}) {
    const ProductCodebook cb = build_product_codebook(budget, 1, 1.0);
    const QuantizedSolution sol = quantized_sde_ensemble(gbm, cb, std::max<Eigen::Index>(256, 32 * cb.frequencies()));
    const double err = std::abs(quantized_expectation(sol, functional_registry().at("terminal")) - exact);
    EXPECT_LE(err, previous) << budget;
    previous = err;
  }
  EXPECT_LT(previous / exact, 0.05);
}

TEST(EnsembleTest, ItoAndStratonovichEntryPointsAgreeForConstantDiffusion) {
  const ProductCodebook cb = build_product_codebook(30, 2, 1.0);
  const QuantizedSolution a = quantized_sde_ensemble(additive_spec(Calculus::Ito), cb, 128);
  const QuantizedSolution b = quantized_sde_ensemble(additive_spec(Calculus::Stratonovich), cb, 128);
  ASSERT_EQ(a.members.size(), b.members.size());
  for (std::size_t i = 0; i < a.members.size(); ++i)
    EXPECT_LT((a.members[i].path.values() - b.members[i].path.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EnsembleTest, BlowUpNamesTheCell) {
  SDESpec s;
  s.drift = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square()); };
  s.diffusion = [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  s.x0 = Eigen::VectorXd::Constant(1, 3.0);
  try {
    quantized_sde_ensemble(s, build_product_codebook(4, 1, 1.0), 200);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_NE(std::string(e.what()).find("cell"), std::string::npos);
  }
}

TEST(RegistryTest, NamesAndErrors) {
  for (const char* name : {"gbm", "zero-diffusion", "linear", "cubic"}) EXPECT_NO_THROW(make_spec(name));
  try {
    make_spec("nope");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("gbm"), std::string::npos);
  }
  EXPECT_EQ(make_spec("linear").dim, 2);
  for (const char* f : {"terminal", "average", "sup", "one"}) EXPECT_EQ(functional_registry().count(f), 1u);
}

TEST(ExperimentTest, ZeroDiffusionIsPureSchemeError) {
  ExperimentSettings settings;
  settings.intervals = 512;
  settings.paths = 8;
  settings.seed = 3;
  const auto rows = pathwise_convergence_experiment(make_spec("zero-diffusion"), {10, 100}, settings);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) EXPECT_LT(r.rho.median, 1e-4);
}

TEST(ExperimentTest, DeterministicAcrossWorkerCounts) {
  ExperimentSettings settings;
  settings.intervals = 256;
  settings.paths = 6;
  settings.seed = 17;
  set_worker_count(1);
  const auto a = pathwise_convergence_experiment(gbm_spec(0.3, 1.0), {10, 100}, settings);
  const auto ha = holder_rate_experiment({10, 100}, 2, settings);
  set_worker_count(4);
  const auto b = pathwise_convergence_experiment(gbm_spec(0.3, 1.0), {10, 100}, settings);
  const auto hb = holder_rate_experiment({10, 100}, 2, settings);
  set_worker_count(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rho.median, b[i].rho.median);
    EXPECT_EQ(a[i].sup.q3, b[i].sup.q3);
    EXPECT_EQ(ha[i].rho.q1, hb[i].rho.q1);
  }
  // Level-1 sup distance is dominated by rho (Hölder with T = 1).
  for (const auto& r : a) EXPECT_LE(r.sup.median, r.rho.q3 + 1e-12);
}

TEST(ExperimentTest, QuartilesInterpolate) {
  const Quartiles q = quartiles({4.0, 1.0, 3.0, 2.0, 5.0});
  EXPECT_EQ(q.median, 3.0);
  EXPECT_EQ(q.q1, 2.0);
  EXPECT_EQ(q.q3, 4.0);
  EXPECT_EQ(quartiles({1.0, 2.0}).median, 1.5);
}

}  // namespace
}  // namespace fqrp
