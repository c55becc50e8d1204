#include "fqrp/qsde.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "fqrp/errors.hpp"
#include "fqrp/parallel.hpp"

namespace fqrp {

namespace {

void check_finite(const Eigen::VectorXd& x, double t, const char* who) {
  if (!x.allFinite()) throw BlowUpError(std::string(who) + ": non-finite state", t);
}

/// sum_j (d_x sigma_{.j}) sigma_{.j}.
Eigen::VectorXd ito_correction(const SDESpec& spec, double t, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd sigma = spec.diffusion(t, x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.dim);
  for (int j = 0; j < spec.noise_dim; ++j) out += spec.column_jacobian(t, x, j) * sigma.col(j);
  return out;
}

SDESpec with_correction(const SDESpec& spec, double sign, Calculus target) {
  SDESpec out = spec;
  out.calculus = target;
  auto base = spec;
  out.drift = [base, sign](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return base.drift(t, x) + (0.5 * sign) * ito_correction(base, t, x);
  };
  return out;
}

std::string format_index(const MultiIndex& idx) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
  os << ']';
  return os.str();
}

}  // namespace

Eigen::MatrixXd SDESpec::column_jacobian(double t, const Eigen::VectorXd& x, int j) const {
  if (jacobian) return jacobian(t, x, j);
  Eigen::MatrixXd out(dim, dim);
  Eigen::VectorXd probe = x;
  for (int k = 0; k < dim; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(x[k]));
    probe[k] = x[k] + h;
    const Eigen::VectorXd up = diffusion(t, probe).col(j);
    probe[k] = x[k] - h;
    const Eigen::VectorXd down = diffusion(t, probe).col(j);
    probe[k] = x[k];
    out.col(k) = (up - down) / (2.0 * h);
  }
  return out;
}

SDESpec ito_to_stratonovich(const SDESpec& spec) {
  if (spec.calculus != Calculus::Ito) throw DomainError("ito_to_stratonovich: spec is not in Itô form");
  return with_correction(spec, -1.0, Calculus::Stratonovich);
}

SDESpec stratonovich_to_ito(const SDESpec& spec) {
  if (spec.calculus != Calculus::Stratonovich)
    throw DomainError("stratonovich_to_ito: spec is not in Stratonovich form");
  return with_correction(spec, 1.0, Calculus::Ito);
}

GridPath solve_elementary_ode(const SDESpec& spec, const QuantizerPath& driver, Eigen::Index intervals) {
  if (spec.calculus != Calculus::Stratonovich) throw DomainError("solve_elementary_ode: spec must be Stratonovich");
  if (intervals < 2) throw DomainError("solve_elementary_ode: need at least two intervals");
  if (driver.dim() != spec.noise_dim) throw CompatibilityError("solve_elementary_ode: driver dimension mismatch");
  const double T = driver.horizon();
  const double h = T / static_cast<double>(intervals);
  auto field = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return spec.drift(t, x) + spec.diffusion(t, x) * driver.derivative(t);
  };
  Eigen::MatrixXd values(intervals + 1, spec.dim);
  Eigen::VectorXd x = spec.x0;
  values.row(0) = x.transpose();
  for (Eigen::Index i = 0; i < intervals; ++i) {
    const double t = h * static_cast<double>(i);
    const Eigen::VectorXd k1 = field(t, x);
    const Eigen::VectorXd k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = field(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(x, t + h, "solve_elementary_ode");
    values.row(i + 1) = x.transpose();
  }
  return GridPath(T, std::move(values));
}

GridPath solve_reference_sde(const SDESpec& spec, const GridPath& brownian) {
  if (spec.calculus != Calculus::Stratonovich) throw DomainError("solve_reference_sde: spec must be Stratonovich");
  if (brownian.dim() != spec.noise_dim) throw CompatibilityError("solve_reference_sde: Brownian dimension mismatch");
  const Eigen::Index n = brownian.intervals();
  const double h = brownian.step();
  Eigen::MatrixXd values(n + 1, spec.dim);
  Eigen::VectorXd x = spec.x0;
  values.row(0) = x.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = brownian.time(i);
    const Eigen::VectorXd dw = (brownian.values().row(i + 1) - brownian.values().row(i)).transpose();
    const Eigen::VectorXd b0 = spec.drift(t, x);
    const Eigen::MatrixXd s0 = spec.diffusion(t, x);
    const Eigen::VectorXd predictor = x + h * b0 + s0 * dw;
    x += 0.5 * h * (b0 + spec.drift(t + h, predictor)) + 0.5 * (s0 + spec.diffusion(t + h, predictor)) * dw;
    check_finite(x, t + h, "solve_reference_sde");
    values.row(i + 1) = x.transpose();
  }
  return GridPath(brownian.horizon(), std::move(values));
}

QuantizedSolution quantized_sde_ensemble(const SDESpec& spec, const ProductCodebook& cb, Eigen::Index intervals) {
  const SDESpec strat = spec.calculus == Calculus::Ito ? ito_to_stratonovich(spec) : spec;
  if (strat.noise_dim != cb.dim) throw CompatibilityError("quantized_sde_ensemble: codebook dimension mismatch");
  QuantizedSolution sol;
  sol.codebook = &cb;
  sol.horizon = cb.horizon;
  sol.intervals = intervals;
  const long cells = cb.size();
  std::vector<std::optional<QuantizedSolution::Member>> members(cells);
  parallel_for(static_cast<std::size_t>(cells), [&](std::size_t cell) {
    MultiIndex idx = cb.unflatten(static_cast<long>(cell));
    try {
      GridPath path = solve_elementary_ode(strat, elementary_path(cb, idx), intervals);
      members[cell] = QuantizedSolution::Member{idx, cell_weight(cb, idx), std::move(path)};
    } catch (const BlowUpError& e) {
      throw BlowUpError("cell " + format_index(idx) + ": " + e.what(), e.time());
    }
  });
  sol.members.reserve(cells);
  for (auto& m : members) sol.members.push_back(std::move(*m));
  return sol;
}

double quantized_expectation(const QuantizedSolution& sol, const PathFunctional& functional) {
  double total = 0.0;
  for (const auto& m : sol.members) total += m.weight * functional(m.path);
  return total;
}

SDESpec gbm_spec(double sigma, double x0) {
  SDESpec spec;
  spec.dim = 1;
  spec.noise_dim = 1;
  spec.drift = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(x.size()); };
  spec.diffusion = [sigma](double, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, sigma * x[0]);
  };
  spec.jacobian = [sigma](double, const Eigen::VectorXd&, int) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, sigma);
  };
  spec.x0 = Eigen::VectorXd::Constant(1, x0);
  spec.calculus = Calculus::Stratonovich;
  return spec;
}

const std::map<std::string, NamedSpec>& spec_registry() {
  static const std::map<std::string, NamedSpec> registry = {
      {"gbm", {"dX = 0.3 X o dW, X_0 = 1", [] { return gbm_spec(0.3, 1.0); }}},
      {"zero-diffusion",
       {"dX = -X dt, X_0 = 1",
        [] {
          SDESpec spec;
          spec.drift = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
          spec.diffusion = [](double, const Eigen::VectorXd&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(1, 1); };
          spec.jacobian = [](double, const Eigen::VectorXd&, int) -> Eigen::MatrixXd {
            return Eigen::MatrixXd::Zero(1, 1);
          };
          spec.x0 = Eigen::VectorXd::Ones(1);
          return spec;
        }}},
      {"linear",
       {"dX = -0.5 X dt + B_1 X o dW^1 + B_2 X o dW^2 in R^2, X_0 = (1, 1)",
        [] {
          static const Eigen::Matrix2d b1 = (Eigen::Matrix2d() << 0.3, 0.0, 0.0, 0.2).finished();
          static const Eigen::Matrix2d b2 = (Eigen::Matrix2d() << 0.0, 0.1, -0.1, 0.0).finished();
          SDESpec spec;
          spec.dim = 2;
          spec.noise_dim = 2;
          spec.drift = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -0.5 * x; };
          spec.diffusion = [](double, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
            Eigen::MatrixXd s(2, 2);
            s.col(0) = b1 * x;
            s.col(1) = b2 * x;
            return s;
          };
          spec.jacobian = [](double, const Eigen::VectorXd&, int j) -> Eigen::MatrixXd { return j == 0 ? b1 : b2; };
          spec.x0 = Eigen::VectorXd::Ones(2);
          return spec;
        }}},
      {"cubic",
       {"dX = -X^3/(1+X^2) dt + 0.5/(1+X^2) o dW, X_0 = 0.5",
        [] {
          SDESpec spec;
          spec.drift = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(1, -x[0] * x[0] * x[0] / (1.0 + x[0] * x[0]));
          };
          spec.diffusion = [](double, const Eigen::VectorXd& x) -> Eigen::MatrixXd {
            return Eigen::MatrixXd::Constant(1, 1, 0.5 / (1.0 + x[0] * x[0]));
          };
          spec.x0 = Eigen::VectorXd::Constant(1, 0.5);
          return spec;
        }}},
  };
  return registry;
}

SDESpec make_spec(const std::string& name) {
  const auto& registry = spec_registry();
  auto it = registry.find(name);
  if (it == registry.end()) throw DomainError("unknown spec '" + name + "'; registered: " + registry_listing());
  return it->second.make();
}

std::string registry_listing() {
  std::string out;
  for (const auto& [name, entry] : spec_registry()) out += (out.empty() ? "" : ", ") + name;
  return out;
}

const std::map<std::string, PathFunctional>& functional_registry() {
  static const std::map<std::string, PathFunctional> registry = {
      {"terminal", [](const GridPath& p) { return p.values()(p.intervals(), 0); }},
      {"average",
       [](const GridPath& p) {
         const auto& v = p.values();
         const Eigen::Index n = p.intervals();
         return (v.col(0).segment(1, n - 1).sum() + 0.5 * (v(0, 0) + v(n, 0))) / static_cast<double>(n);
       }},
      {"sup", [](const GridPath& p) { return p.values().col(0).maxCoeff(); }},
      {"one", [](const GridPath&) { return 1.0; }},
  };
  return registry;
}

}  // namespace fqrp
