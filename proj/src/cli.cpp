#include "fqrp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "fqrp/codebook.hpp"
#include "fqrp/errors.hpp"
#include "fqrp/experiments.hpp"
#include "fqrp/io.hpp"
#include "fqrp/parallel.hpp"
#include "fqrp/qsde.hpp"

namespace fqrp::cli {

namespace {

using nlohmann::json;

struct Config {
  std::vector<long> budgets{10, 100, 1000};
  int dim = 1;
  double horizon = 1.0;
  double q = 2.5;
  std::optional<double> p;
  long grid = 4096;
  int paths = 200;
  std::uint64_t seed = 0;
  std::string spec = "gbm";
  std::string functional = "terminal";
  std::string out;
  std::string format = "csv";
  std::string cubature_format = "json";
  std::string input;
  unsigned threads = 0;
};

std::string invocation(const std::vector<std::string>& args) {
  std::string s = "fqrp";
  for (const auto& a : args) s += " " + a;
  return s;
}

void emit(const Config& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty())
    out << text;
  else
    io::write_text_file(cfg.out, text);
}

std::string csv_preamble(const std::vector<std::string>& args) {
  return std::string("# ") + invocation(args) + " (fqrp " + kVersion + ")\n";
}

std::string quartile_cells(const Quartiles& q) {
  return io::format_number(q.median) + "," + io::format_number(q.q1) + "," + io::format_number(q.q3);
}

std::string delta_header(const Config& cfg) { return cfg.p ? ",delta_median,delta_q1,delta_q3" : ""; }

std::string delta_cells(const std::optional<Quartiles>& q) { return q ? "," + quartile_cells(*q) : ""; }

void require_positive_budgets(const Config& cfg) {
  if (cfg.budgets.empty()) throw DomainError("--N: need at least one budget");
  for (long n : cfg.budgets)
    if (n < 1) throw DomainError("--N: budgets must be >= 1");
  if (!(cfg.horizon > 0.0)) throw DomainError("--T must be positive");
}

int codebook_build(const Config& cfg, std::ostream& out) {
  require_positive_budgets(cfg);
  if (cfg.budgets.size() != 1) throw DomainError("codebook build: --N takes a single budget");
  if (cfg.dim < 1) throw DomainError("--d must be >= 1");
  const ProductCodebook cb = build_product_codebook(cfg.budgets.front(), cfg.dim, cfg.horizon);
  const std::string text = io::dump(io::to_json(cb));
  if (cfg.out.empty()) {
    out << text;
    return kSuccess;
  }
  io::write_text_file(cfg.out, text);
  out << "size " << cb.size() << "\nallocation [";
  for (std::size_t k = 0; k < cb.allocation.levels.size(); ++k) out << (k ? "," : "") << cb.allocation.levels[k];
  out << "]\ndistortion " << io::format_number(codebook_distortion(cb)) << '\n';
  return kSuccess;
}

int codebook_show(const Config& cfg, std::ostream& out) {
  json j;
  try {
    j = json::parse(io::read_text_file(cfg.input));
  } catch (const json::exception& e) {
    throw IoError("'" + cfg.input + "' is not valid JSON: " + e.what());
  }
  const ProductCodebook cb = io::codebook_from_json(j);
  out << "T " << io::format_number(cb.horizon) << "\nd " << cb.dim << "\nbudget " << cb.budget << "\nsize "
      << cb.size() << "\nallocation [";
  for (std::size_t k = 0; k < cb.allocation.levels.size(); ++k) out << (k ? "," : "") << cb.allocation.levels[k];
  out << "]\ndistortion " << io::format_number(codebook_distortion(cb)) << '\n';
  return kSuccess;
}

int rate_quadratic(const Config& cfg, const std::vector<std::string>& args, std::ostream& out) {
  require_positive_budgets(cfg);
  const auto rows = quadratic_rate_table(cfg.budgets, cfg.horizon);
  std::string text;
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back({{"N", r.budget}, {"error", r.error}, {"normalized", r.normalized}});
    text = io::dump(json{{"T", cfg.horizon}, {"rows", arr}});
  } else {
    text = csv_preamble(args) + "N,error,normalized\n";
    for (const auto& r : rows)
      text += std::to_string(r.budget) + "," + io::format_number(r.error) + "," + io::format_number(r.normalized) + "\n";
  }
  emit(cfg, text, out);
  return kSuccess;
}

ExperimentSettings settings_from(const Config& cfg) {
  if (cfg.paths < 1) throw DomainError("--paths must be >= 1");
  if (cfg.grid < 2) throw DomainError("--grid must be >= 2");
  return {cfg.horizon, cfg.q, static_cast<Eigen::Index>(cfg.grid), cfg.paths, cfg.seed, cfg.p};
}

int rate_holder(const Config& cfg, const std::vector<std::string>& args, std::ostream& out) {
  require_positive_budgets(cfg);
  if (!(cfg.q > 2.0)) throw DomainError("--q must exceed 2");
  if (cfg.paths < 50) throw DomainError("rate holder: --paths must be >= 50");
  const auto rows = holder_rate_experiment(cfg.budgets, cfg.dim, settings_from(cfg));
  std::string text = csv_preamble(args) +
                     "N,level1_median,level1_q1,level1_q3,level2_median,level2_q1,level2_q3,rho_median,rho_q1,rho_q3,"
                     "sup_median,sup_q1,sup_q3" + delta_header(cfg) + "\n";
  for (const auto& r : rows)
    text += std::to_string(r.budget) + "," + quartile_cells(r.level1) + "," + quartile_cells(r.level2) + "," +
            quartile_cells(r.rho) + "," + quartile_cells(r.sup) + delta_cells(r.delta) + "\n";
  emit(cfg, text, out);
  return kSuccess;
}

int sde_converge(const Config& cfg, const std::vector<std::string>& args, std::ostream& out) {
  require_positive_budgets(cfg);
  const SDESpec spec = make_spec(cfg.spec);
  const auto rows = pathwise_convergence_experiment(spec, cfg.budgets, settings_from(cfg));
  std::string text =
      csv_preamble(args) + "N,rho_median,rho_q1,rho_q3,sup_median,sup_q1,sup_q3" + delta_header(cfg) + "\n";
  for (const auto& r : rows)
    text += std::to_string(r.budget) + "," + quartile_cells(r.rho) + "," + quartile_cells(r.sup) +
            delta_cells(r.delta) + "\n";
  emit(cfg, text, out);
  return kSuccess;
}

int cubature(const Config& cfg, std::ostream& out) {
  require_positive_budgets(cfg);
  if (cfg.budgets.size() != 1) throw DomainError("cubature: --N takes a single budget");
  const SDESpec spec = make_spec(cfg.spec);
  const auto& functionals = functional_registry();
  const auto f = functionals.find(cfg.functional);
  if (f == functionals.end()) throw DomainError("unknown functional '" + cfg.functional + "'");
  const ProductCodebook cb = build_product_codebook(cfg.budgets.front(), spec.noise_dim, cfg.horizon);
  const Eigen::Index intervals = std::max<Eigen::Index>(cfg.grid, 32 * std::max(1, cb.frequencies()));
  const QuantizedSolution sol = quantized_sde_ensemble(spec, cb, intervals);
  const double estimate = quantized_expectation(sol, f->second);
  const json result{{"estimate", estimate},
                    {"N", cfg.budgets.front()},
                    {"cells", cb.size()},
                    {"functional", cfg.functional},
                    {"spec", cfg.spec},
                    {"T", cfg.horizon},
                    {"grid", intervals}};
  std::string text;
  if (cfg.cubature_format == "csv")
    text = "estimate,N,functional\n" + io::format_number(estimate) + "," + std::to_string(cfg.budgets.front()) + "," +
           cfg.functional + "\n";
  else
    text = io::dump(result);
  emit(cfg, text, out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Functional quantization of Brownian motion, rough-path lifts and quantized SDE cubature", "fqrp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  auto add_common = [&](CLI::App* sub, bool stochastic) {
    sub->add_option("--N", cfg.budgets, "Budget or comma-separated budgets")->delimiter(',');
    sub->add_option("--T", cfg.horizon, "Time horizon");
    sub->add_option("--out", cfg.out, "Output file (stdout when omitted)");
    if (stochastic) {
      sub->add_option("--seed", cfg.seed, "Random seed")->required();
      sub->add_option("--paths", cfg.paths, "Monte Carlo paths");
      sub->add_option("--grid", cfg.grid, "Grid intervals");
      sub->add_option("--q", cfg.q, "Hölder exponent q > 2");
      sub->add_option("--p", cfg.p, "Also report the p-variation distance (2 <= p, grid <= 4096)");
    }
  };

  auto* codebook = app.add_subcommand("codebook", "Product codebooks");
  codebook->require_subcommand(1);
  auto* build = codebook->add_subcommand("build", "Build a product codebook and write it as JSON");
  add_common(build, false);
  build->add_option("--d", cfg.dim, "Brownian dimension");
  auto* show = codebook->add_subcommand("show", "Summarize a codebook JSON file");
  show->add_option("file", cfg.input, "Codebook JSON")->required();

  auto* rate = app.add_subcommand("rate", "Quantization rate tables");
  rate->require_subcommand(1);
  auto* quadratic = rate->add_subcommand("quadratic", "Exact quadratic error of product quantizers");
  add_common(quadratic, false);
  quadratic->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));
  auto* holder = rate->add_subcommand("holder", "Hölder and rough-path distances between W and its quantization");
  add_common(holder, true);
  holder->add_option("--d", cfg.dim, "Brownian dimension");

  auto* sde = app.add_subcommand("sde", "Quantized SDE experiments");
  sde->require_subcommand(1);
  auto* converge = sde->add_subcommand("converge", "rho_q distance between quantized ODE and reference SDE");
  add_common(converge, true);
  converge->add_option("--spec", cfg.spec, "Registered SDE");

  auto* cub = app.add_subcommand("cubature", "Quantized expectation of a path functional");
  add_common(cub, false);
  cub->add_option("--spec", cfg.spec, "Registered SDE");
  cub->add_option("--functional", cfg.functional, "terminal | average | sup | one");
  cub->add_option("--grid", cfg.grid, "Grid intervals (raised to 32x the frequency count if needed)");
  cub->add_option("--format", cfg.cubature_format)->check(CLI::IsMember({"csv", "json"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  try {
    set_worker_count(cfg.threads);
    if (build->parsed()) return codebook_build(cfg, out);
    if (show->parsed()) return codebook_show(cfg, out);
    if (quadratic->parsed()) return rate_quadratic(cfg, args, out);
    if (holder->parsed()) return rate_holder(cfg, args, out);
    if (converge->parsed()) return sde_converge(cfg, args, out);
    if (cub->parsed()) return cubature(cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  err << app.help();
  return kUsage;
}

}  // namespace fqrp::cli
