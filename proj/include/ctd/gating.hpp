#pragma once

#include <limits>

namespace ctd {

/// Degrees of freedom of the (cx, cy, a, h) measurement space.
inline constexpr int kMeasurementDof = 4;

/// Chi-square CDF F(x | dof), via the regularized lower incomplete gamma
/// function P(dof/2, x/2). Throws std::domain_error for x < 0 or dof < 1.
double chi2_cdf(double x, int dof);

/// Chi-square density f(x | dof). Zero for x < 0.
double chi2_pdf(double x, int dof);

/// Inverse of chi2_cdf for p in [0, 1). p == 1 has no finite quantile and is
/// rejected; callers map it to GateSpec's infinite sentinel first.
double chi2_inverse_cdf(double p, int dof);

/// A confidence probability turned into a squared-Mahalanobis threshold.
struct GateSpec {
  double p = 1.0;
  int dof = kMeasurementDof;
  double d = std::numeric_limits<double>::infinity();

  /// True when p == 1, i.e. the gate can never be exceeded.
  bool unbounded() const noexcept { return d == std::numeric_limits<double>::infinity(); }

  /// Low-confidence predicate: the squared distance lies beyond the gate.
  bool exceeded_by(double m2) const noexcept { return m2 > d; }

  /// Whether a squared distance is admissible for association.
  bool admits(double m2) const noexcept { return m2 <= d; }
};

/// Gate for the four-dimensional box measurement. p == 1 yields the infinite
/// sentinel (confidence triggering disabled).
GateSpec gate_from_confidence(double p);

}  // namespace ctd
