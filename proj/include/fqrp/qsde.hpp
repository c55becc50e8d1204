#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fqrp/codebook.hpp"
#include "fqrp/kl.hpp"

namespace fqrp {

enum class Calculus { Ito, Stratonovich };

/// dX = b(t, X) dt + sigma(t, X) dW in the Itô or Stratonovich sense. The
/// state has dim components and the driving Brownian motion noise_dim.
/// Time is kept as an explicit argument rather than an extra state row.
struct SDESpec {
  using Drift = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
  using Diffusion = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;
  /// Jacobian in x of column j of sigma (dim x dim).
  using DiffusionJacobian = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&, int)>;

  int dim = 1;
  int noise_dim = 1;
  Drift drift;
  Diffusion diffusion;
  DiffusionJacobian jacobian;  // optional
  Eigen::VectorXd x0;
  Calculus calculus = Calculus::Stratonovich;

  /// d sigma_{.j} / dx, analytic when available, central differences with
  /// step 1e-6 (1 + |x|) otherwise.
  Eigen::MatrixXd column_jacobian(double t, const Eigen::VectorXd& x, int j) const;
};

/// b_S = b - (1/2) sum_j (d_x sigma_{.j}) sigma_{.j}.
SDESpec ito_to_stratonovich(const SDESpec& spec);
/// Inverse correction, b = b_S + (1/2) sum_j (d_x sigma_{.j}) sigma_{.j}.
SDESpec stratonovich_to_ito(const SDESpec& spec);

/// Classical RK4 on dx/dt = b(t, x) + sigma(t, x) alpha'(t), step T/n.
GridPath solve_elementary_ode(const SDESpec& spec, const QuantizerPath& driver, Eigen::Index intervals);

/// Stratonovich Heun scheme along a sampled Brownian path.
GridPath solve_reference_sde(const SDESpec& spec, const GridPath& brownian);

struct QuantizedSolution {
  struct Member {
    MultiIndex index;
    double weight;
    GridPath path;
  };
  const ProductCodebook* codebook = nullptr;
  std::vector<Member> members;
  double horizon = 1.0;
  Eigen::Index intervals = 0;
};

/// One ODE per codebook cell, weighted by the cell probability. Itô specs are
/// converted first. A blow-up in any cell is rethrown naming the cell.
QuantizedSolution quantized_sde_ensemble(const SDESpec& spec, const ProductCodebook& cb, Eigen::Index intervals);

using PathFunctional = std::function<double(const GridPath&)>;

/// sum_n w_n F(x_n).
double quantized_expectation(const QuantizedSolution& sol, const PathFunctional& functional);

/// Built-in SDEs, Stratonovich form, selected by name.
struct NamedSpec {
  std::string description;
  std::function<SDESpec()> make;
};
const std::map<std::string, NamedSpec>& spec_registry();
SDESpec make_spec(const std::string& name);
std::string registry_listing();

/// Geometric Brownian motion x0 exp(sigma W_t): b = 0, sigma(t, x) = sigma x.
SDESpec gbm_spec(double sigma, double x0);

/// Built-in path functionals of the first state component.
const std::map<std::string, PathFunctional>& functional_registry();

}  // namespace fqrp
