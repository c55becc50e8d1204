#pragma once

// Standard normal density, distribution and quantile, written for accuracy in
// the tails (cell masses are computed from the nearer tail).

namespace fqrp::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

double pdf(double x);
double cdf(double x);
/// Upper tail 1 - cdf(x) without cancellation.
double sf(double x);
/// P(a < Z <= b) for a <= b, accurate when both bounds lie in one tail.
double mass(double a, double b);
/// Inverse of cdf on (0, 1).
double quantile(double p);

}  // namespace fqrp::normal
