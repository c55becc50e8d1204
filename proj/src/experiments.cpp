#include "fqrp/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "fqrp/errors.hpp"
#include "fqrp/parallel.hpp"
#include "fqrp/roughpath.hpp"

namespace fqrp {

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double level) {
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_settings(const ExperimentSettings& s) {
  if (!(s.q > 2.0)) throw DomainError("experiment: q must exceed 2");
  if (s.paths < 1) throw DomainError("experiment: need at least one path");
  if (s.intervals < 2) throw DomainError("experiment: need at least two grid intervals");
  if (s.p && !(*s.p >= 2.0)) throw DomainError("experiment: p must be >= 2");
  if (s.p && s.intervals > kExhaustivePairsLimit) throw DomainError("experiment: p-variation needs a grid of at most 4096 intervals");
}

std::vector<ProductCodebook> build_all(const std::vector<long>& budgets, int dim, double horizon) {
  std::vector<ProductCodebook> out;
  for (long n : budgets) out.push_back(build_product_codebook(n, dim, horizon));
  return out;
}

/// samples[b][p] -> quartiles per budget.
std::vector<Quartiles> summarize(const std::vector<std::vector<double>>& samples) {
  std::vector<Quartiles> out;
  for (const auto& s : samples) out.push_back(quartiles(s));
  return out;
}

std::optional<Quartiles> optional_summary(const ExperimentSettings& s, const std::vector<double>& sample) {
  if (!s.p) return std::nullopt;
  return quartiles(sample);
}

}  // namespace

Quartiles quartiles(std::vector<double> sample) {
  if (sample.empty()) throw DomainError("quartiles: empty sample");
  std::sort(sample.begin(), sample.end());
  return {interpolated_quantile(sample, 0.25), interpolated_quantile(sample, 0.5), interpolated_quantile(sample, 0.75)};
}

std::uint64_t path_seed(std::uint64_t seed, std::size_t path) { return mix_seed(seed, path); }

std::vector<QuadraticRateRow> quadratic_rate_table(const std::vector<long>& budgets, double horizon) {
  std::vector<QuadraticRateRow> rows;
  for (long n : budgets) {
    const double error = std::sqrt(codebook_distortion(build_product_codebook(n, 1, horizon)));
    rows.push_back({n, error, error * std::sqrt(std::log(static_cast<double>(n))) / horizon});
  }
  return rows;
}

std::vector<HolderRateRow> holder_rate_experiment(const std::vector<long>& budgets, int dim,
                                                  const ExperimentSettings& settings) {
  check_settings(settings);
  const auto codebooks = build_all(budgets, dim, settings.horizon);
  const std::size_t B = budgets.size();
  const std::size_t P = static_cast<std::size_t>(settings.paths);
  std::vector<std::vector<double>> level1(B, std::vector<double>(P)), level2 = level1, rho = level1, sup = level1,
                                   delta = level1;

  parallel_for(P, [&](std::size_t p) {
    const GridPath w = simulate_brownian(settings.intervals, dim, settings.horizon, path_seed(settings.seed, p));
    const EnhancedPath lifted = enhance_brownian(w);
    for (std::size_t b = 0; b < B; ++b) {
      const QuantizerPath what = elementary_path(codebooks[b], voronoi_project(w, codebooks[b]));
      const EnhancedPath lifted_hat = enhance_quantizer(what, settings.intervals);
      const RhoTerms terms = rho_q_terms(lifted, lifted_hat, settings.q);
      level1[b][p] = terms.level1;
      level2[b][p] = terms.level2;
      rho[b][p] = terms.total();
      sup[b][p] = sup_distance_from_start(w.values() - what.sample(settings.intervals).values());
      if (settings.p) delta[b][p] = delta_p(lifted, lifted_hat, *settings.p);
    }
  });

  const auto l1 = summarize(level1), l2 = summarize(level2), r = summarize(rho), s = summarize(sup);
  std::vector<HolderRateRow> rows;
  for (std::size_t b = 0; b < B; ++b)
    rows.push_back({budgets[b], l1[b], l2[b], r[b], s[b], optional_summary(settings, delta[b])});
  return rows;
}

std::vector<ConvergenceRow> pathwise_convergence_experiment(const SDESpec& spec, const std::vector<long>& budgets,
                                                            const ExperimentSettings& settings) {
  check_settings(settings);
  const SDESpec strat = spec.calculus == Calculus::Ito ? ito_to_stratonovich(spec) : spec;
  const auto codebooks = build_all(budgets, strat.noise_dim, settings.horizon);
  const std::size_t B = budgets.size();
  const std::size_t P = static_cast<std::size_t>(settings.paths);
  std::vector<std::vector<double>> rho(B, std::vector<double>(P)), sup = rho, delta = rho;

  parallel_for(P, [&](std::size_t p) {
    const GridPath w =
        simulate_brownian(settings.intervals, strat.noise_dim, settings.horizon, path_seed(settings.seed, p));
    const GridPath reference = solve_reference_sde(strat, w);
    const EnhancedPath lifted = enhance_brownian(reference);
    for (std::size_t b = 0; b < B; ++b) {
      const QuantizerPath driver = elementary_path(codebooks[b], voronoi_project(w, codebooks[b]));
      const GridPath approx = solve_elementary_ode(strat, driver, settings.intervals);
      const EnhancedPath lifted_approx = enhance_brownian(approx);
      rho[b][p] = rho_q(lifted_approx, lifted, settings.q);
      if (settings.p) delta[b][p] = delta_p(lifted_approx, lifted, *settings.p);
      sup[b][p] = (approx.values() - reference.values()).rowwise().norm().maxCoeff();
    }
  });

  const auto r = summarize(rho), s = summarize(sup);
  std::vector<ConvergenceRow> rows;
  for (std::size_t b = 0; b < B; ++b) rows.push_back({budgets[b], r[b], s[b], optional_summary(settings, delta[b])});
  return rows;
}

}  // namespace fqrp
