#pragma once

// Special functions used by the distribution oracles: regularized incomplete
// beta (continued fraction), its inverse, and the CDFs built on top of it.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace herdsim {

inline double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

// Continued fraction for the incomplete beta, modified Lentz iteration.
inline double beta_cont_frac(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 3e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("reg_inc_beta: shape parameters must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = a * std::log(x) + b * std::log1p(-x) - lbeta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(ln_front) * detail::beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - std::exp(ln_front) * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

inline double beta_cdf(double x, double a, double b) {
  return reg_inc_beta(a, b, x);
}

inline double beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                  lbeta(a, b));
}

// Inverse of I_x(a, b): asymptotic tail seed plus bracketed Newton. Accurate
// enough for inverse-CDF sampling even deep in an x^a tail.
inline double beta_quantile(double a, double b, double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::domain_error("beta_quantile: p outside [0, 1]");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double lb = lbeta(a, b);
  double lo = 0.0, hi = 1.0;
  double x;

  // I_x ~ x^a / (a B(a,b)) as x -> 0, and symmetrically at the other end.
  const double lower_seed = (std::log(p) + std::log(a) + lb) / a;
  const double upper_seed = (std::log1p(-p) + std::log(b) + lb) / b;
  if (lower_seed < std::log(0.05)) {
    x = std::exp(lower_seed);
    if (x < 1e-12) return x;  // asymptote exact to O(x) here
  } else if (upper_seed < std::log(0.05)) {
    x = 1.0 - std::exp(upper_seed);
    if (1.0 - x < 1e-12) return x;
  } else {
    x = a / (a + b);
  }

  for (int it = 0; it < 200; ++it) {
    const double f = reg_inc_beta(a, b, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::fabs(f) < 1e-14) break;
    const double pdf = beta_pdf(x, a, b);
    double next = (pdf > 0.0 && std::isfinite(pdf)) ? x - f / pdf : x;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
    if (hi - lo < 1e-17 * (1.0 + x)) break;
  }
  return x;
}

// Student-t CDF with dof degrees of freedom (unit scale).
inline double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("student_t_cdf: dof must be > 0");
  if (t == 0.0) return 0.5;
  const double x = dof / (dof + t * t);
  const double half_tail = 0.5 * reg_inc_beta(0.5 * dof, 0.5, x);
  return t > 0.0 ? 1.0 - half_tail : half_tail;
}

inline double student_t_pdf(double t, double dof) {
  const double ln = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                    0.5 * std::log(dof * M_PI) -
                    0.5 * (dof + 1.0) * std::log1p(t * t / dof);
  return std::exp(ln);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace herdsim
