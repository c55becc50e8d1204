#include "fqrp/roughpath.hpp"

#include <string>

#include "fqrp/quadrature.hpp"

namespace fqrp {

namespace {

void check_compatible(const EnhancedPath& x, const EnhancedPath& y) {
  if (x.intervals() != y.intervals() || x.dim() != y.dim() || x.horizon() != y.horizon())
    throw CompatibilityError("enhanced paths differ in grid or dimension (" + std::to_string(x.intervals()) + "x" +
                             std::to_string(x.dim()) + " vs " + std::to_string(y.intervals()) + "x" +
                             std::to_string(y.dim()) + ")");
}

/// |A^X_{s,t} - A^Y_{s,t}| (Frobenius).
class AreaDifference {
 public:
  AreaDifference(const EnhancedPath& x, const EnhancedPath& y)
      : x_(x), y_(y), ax_(x.dim() * x.dim()), ay_(y.dim() * y.dim()) {}
  double operator()(Eigen::Index s, Eigen::Index t) {
    x_.area_into(s, t, ax_.data());
    y_.area_into(s, t, ay_.data());
    return (ax_ - ay_).norm();
  }

 private:
  const EnhancedPath& x_;
  const EnhancedPath& y_;
  Eigen::VectorXd ax_, ay_;
};

/// Accumulates per-interval areas into prefix areas via Chen's relation.
Eigen::MatrixXd accumulate(const Eigen::MatrixXd& level1, const std::vector<Eigen::MatrixXd>& increments) {
  const Eigen::Index D = level1.cols();
  const Eigen::Index n = level1.rows() - 1;
  Eigen::MatrixXd prefix(n + 1, D * D);
  prefix.row(0).setZero();
  Eigen::MatrixXd running = Eigen::MatrixXd::Zero(D, D);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd from_start = (level1.row(j) - level1.row(0)).transpose();
    const Eigen::VectorXd step = (level1.row(j + 1) - level1.row(j)).transpose();
    running += increments[j] + from_start * step.transpose();
    for (Eigen::Index a = 0; a < D; ++a)
      for (Eigen::Index b = 0; b < D; ++b) prefix(j + 1, a * D + b) = running(a, b);
  }
  return prefix;
}

}  // namespace

EnhancedPath::EnhancedPath(double horizon, Eigen::MatrixXd level1, Eigen::MatrixXd prefix_areas)
    : horizon_(horizon), level1_(std::move(level1)), prefix_(std::move(prefix_areas)) {
  if (level1_.rows() < 2) throw GridError("EnhancedPath: need at least one interval");
  if (prefix_.rows() != level1_.rows() || prefix_.cols() != level1_.cols() * level1_.cols())
    throw CompatibilityError("EnhancedPath: area table does not match the path");
  points_ = level1_.transpose();
  prefix_points_ = prefix_.transpose();
}

void EnhancedPath::area_into(Eigen::Index s, Eigen::Index t, double* out) const {
  const Eigen::Index D = dim();
  const double* x0 = points_.col(0).data();
  const double* xs = points_.col(s).data();
  const double* xt = points_.col(t).data();
  const double* ps = prefix_points_.col(s).data();
  const double* pt = prefix_points_.col(t).data();
  for (Eigen::Index a = 0; a < D; ++a) {
    const double left = xs[a] - x0[a];
    for (Eigen::Index b = 0; b < D; ++b) out[a * D + b] = pt[a * D + b] - ps[a * D + b] - left * (xt[b] - xs[b]);
  }
}

Eigen::MatrixXd EnhancedPath::area(Eigen::Index s, Eigen::Index t) const {
  if (s < 0 || t > intervals() || s > t) throw IndexError("EnhancedPath::area: need 0 <= s <= t <= n");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(dim(), dim());
  area_into(s, t, out.data());
  return out;
}

EnhancedPath enhance_quantizer(const QuantizerPath& path, Eigen::Index intervals) {
  if (intervals < 2) throw DomainError("enhance_quantizer: need at least two intervals");
  const Eigen::Index d = path.dim();
  const Eigen::Index D = d + 1;
  const double T = path.horizon();
  const double h = T / static_cast<double>(intervals);
  const auto& rule = quad::gauss_legendre(8);

  Eigen::MatrixXd level1(intervals + 1, D);
  for (Eigen::Index j = 0; j <= intervals; ++j) {
    const double t = h * static_cast<double>(j);
    level1(j, 0) = t;
    level1.block(j, 1, 1, d) = path.value(t).transpose();
  }

  std::vector<Eigen::MatrixXd> increments(intervals);
  Eigen::VectorXd offset(D), rate(D);
  for (Eigen::Index j = 0; j < intervals; ++j) {
    const double t0 = h * static_cast<double>(j);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(D, D);
    for (Eigen::Index m = 0; m < rule.nodes.size(); ++m) {
      const double u = t0 + 0.5 * h * (rule.nodes[m] + 1.0);
      offset[0] = u - t0;
      offset.tail(d) = path.value(u) - level1.row(j).tail(d).transpose();
      rate[0] = 1.0;
      rate.tail(d) = path.derivative(u);
      a += (0.5 * h * rule.weights[m]) * offset * rate.transpose();
    }
    increments[j] = std::move(a);
  }
  return EnhancedPath(T, level1, accumulate(level1, increments));
}

EnhancedPath enhance_brownian(const GridPath& path) {
  const Eigen::Index d = path.dim();
  const Eigen::Index D = d + 1;
  const Eigen::Index n = path.intervals();
  const double h = path.step();

  Eigen::MatrixXd level1(n + 1, D);
  level1.col(0) = path.times();
  level1.rightCols(d) = path.values();

  std::vector<Eigen::MatrixXd> increments(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd dx = (path.values().row(j + 1) - path.values().row(j)).transpose();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(D, D);
    a(0, 0) = 0.5 * h * h;
    for (Eigen::Index i = 0; i < d; ++i) {
      a(0, i + 1) = 0.5 * h * dx[i];
      a(i + 1, 0) = 0.5 * h * dx[i];
      a(i + 1, i + 1) = 0.5 * dx[i] * dx[i];
    }
    increments[j] = std::move(a);
  }
  return EnhancedPath(path.horizon(), level1, accumulate(level1, increments));
}

std::vector<Eigen::Index> holder_gaps(Eigen::Index intervals) {
  std::vector<Eigen::Index> gaps;
  if (intervals <= kExhaustivePairsLimit) {
    for (Eigen::Index g = 1; g <= intervals; ++g) gaps.push_back(g);
    return gaps;
  }
  for (Eigen::Index g = 1; g <= std::min<Eigen::Index>(64, intervals); ++g) gaps.push_back(g);
  for (Eigen::Index g = 128; g <= intervals; g *= 2) gaps.push_back(g);
  if (gaps.back() != intervals) gaps.push_back(intervals);
  return gaps;
}

double holder_seminorm_level2(const EnhancedPath& x, double q) {
  if (!(q > 0.0)) throw DomainError("holder_seminorm_level2: q must be positive");
  Eigen::VectorXd buffer(x.dim() * x.dim());
  return holder_sup(x.intervals(), x.horizon(), 2.0 / q, [&](Eigen::Index s, Eigen::Index t) {
    x.area_into(s, t, buffer.data());
    return buffer.norm();
  });
}

RhoTerms rho_q_terms(const EnhancedPath& x, const EnhancedPath& y, double q) {
  check_compatible(x, y);
  if (!(q > 0.0)) throw DomainError("rho_q: q must be positive");
  RhoTerms terms;
  terms.level1 = holder_seminorm(x.level1() - y.level1(), x.horizon(), q);
  terms.level2 = holder_sup(x.intervals(), x.horizon(), 2.0 / q, AreaDifference(x, y));
  return terms;
}

double rho_q(const EnhancedPath& x, const EnhancedPath& y, double q) { return rho_q_terms(x, y, q).total(); }

double delta_p(const EnhancedPath& x, const EnhancedPath& y, double p) {
  check_compatible(x, y);
  if (!(p >= 2.0)) throw DomainError("delta_p: p must be >= 2");
  return p_variation(x.level1() - y.level1(), p) + variation_dp(x.intervals(), p / 2.0, AreaDifference(x, y));
}

}  // namespace fqrp
