#include "ctd/gating.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ctd {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 1000;

// P(a, x) by its power series; converges quickly for x < a + 1.
double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double denom = a;
  for (int n = 0; n < kMaxIter; ++n) {
    denom += 1.0;
    term *= x / denom;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) = 1 - P(a, x) by the Legendre continued fraction (modified Lentz).
double upper_gamma_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double regularized_lower_gamma(double a, double x) {
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return 1.0 - upper_gamma_fraction(a, x);
}

void check_dof(int dof) {
  if (dof < 1) throw std::domain_error("chi-square degrees of freedom must be >= 1, got " + std::to_string(dof));
}

}  // namespace

double chi2_cdf(double x, int dof) {
  check_dof(dof);
  if (!(x >= 0.0)) throw std::domain_error("chi2_cdf: x must be nonnegative");
  return regularized_lower_gamma(0.5 * dof, 0.5 * x);
}

double chi2_pdf(double x, int dof) {
  check_dof(dof);
  if (x < 0.0) return 0.0;
  const double k = 0.5 * dof;
  if (x == 0.0) {
    if (dof == 1) return std::numeric_limits<double>::infinity();
    return dof == 2 ? 0.5 : 0.0;
  }
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - std::lgamma(k));
}

double chi2_inverse_cdf(double p, int dof) {
  check_dof(dof);
  if (!(p >= 0.0) || p >= 1.0) throw std::domain_error("chi2_inverse_cdf: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;

  // Bracket the root, then run Newton steps that fall back to bisection
  // whenever they would leave the bracket.
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (chi2_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = chi2_cdf(x, dof) - p;
    if (std::abs(f) <= 1e-14 * p) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = chi2_pdf(x, dof);
    double next = slope > 0.0 && std::isfinite(slope) ? x - f / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * hi) return next;
    x = next;
  }
  return x;
}

GateSpec gate_from_confidence(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("confidence must lie in [0, 1]");
  GateSpec gate;
  gate.p = p;
  gate.dof = kMeasurementDof;
  gate.d = p == 1.0 ? std::numeric_limits<double>::infinity() : chi2_inverse_cdf(p, kMeasurementDof);
  return gate;
}

}  // namespace ctd
