#pragma once

// Exogenous noise: Gaussian or q-Gaussian (Tsallis) per-window shocks, the
// volatility map sigma = b(1 + a|p|), and the optional intraday seasonality
// of the noise scale b.

#include <cmath>
#include <string>

#include "herdsim/errors.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

enum class NoiseKind { Gaussian, QGaussian };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::QGaussian;
  double lambda = 4.0;  // tail exponent, q-Gaussian only
  double T = 1.0;       // return window, minutes
};

inline void validate(const NoiseSpec& spec) {
  auto fail = [](const std::string& msg) {
    throw ValidationError("noise_model", "validate_noise", msg);
  };
  if (!(spec.T > 0.0)) fail("return window T must be > 0");
  if (spec.kind == NoiseKind::QGaussian && !(spec.lambda > 2.0)) {
    fail("q-Gaussian noise requires lambda > 2");
  }
}

// Window-length-dependent scale of the q-Gaussian return distribution:
//   sigma_q(T) = [sqrt(pi(l-1)) Gamma((l-1)/2) / Gamma(l/2)]^(1/(l-1))
//                * [(l-2)/l * T]^(l/(2(l-1)))
inline double sigma_q(double T, double lambda) {
  if (!(T > 0.0)) {
    throw ValidationError("noise_model", "sigma_q", "T must be > 0");
  }
  if (!(lambda > 2.0)) {
    throw ValidationError("noise_model", "sigma_q", "lambda must be > 2");
  }
  const double lm1 = lambda - 1.0;
  const double ln_front = 0.5 * std::log(M_PI * lm1) +
                          std::lgamma(0.5 * lm1) - std::lgamma(0.5 * lambda);
  const double front = std::exp(ln_front / lm1);
  const double body =
      std::pow((lambda - 2.0) / lambda * T, lambda / (2.0 * lm1));
  return front * body;
}

// Unit q-Gaussian with q = 1 + 2/lambda, density proportional to
// (1 + u^2/(lambda-1))^(-lambda/2): identical to a Student-t with
// lambda - 1 degrees of freedom at unit scale, sampled exactly as such.
inline double sample_unit_qgaussian(Rng& rng, double lambda) {
  if (!(lambda > 2.0)) {
    throw ValidationError("noise_model", "sample_unit_qgaussian",
                          "lambda must be > 2");
  }
  return rng.next_student_t(lambda - 1.0);
}

// Analytic density of the unit q-Gaussian, written in the Tsallis form.
inline double unit_qgaussian_pdf(double u, double lambda) {
  const double q = 1.0 + 2.0 / lambda;
  const double norm =
      std::exp(0.5 * std::log(M_PI * (lambda - 1.0)) +
               std::lgamma(0.5 * (lambda - 1.0)) - std::lgamma(0.5 * lambda));
  return std::pow(1.0 - (1.0 - q) * u * u / (3.0 - q), 1.0 / (1.0 - q)) / norm;
}

// Volatility map sigma(t) = b_t (1 + a |p|).
inline double volatility(double p, double a, double b_t) {
  if (!(b_t > 0.0)) {
    throw ValidationError("noise_model", "volatility", "b_t must be > 0");
  }
  if (!(a >= 0.0)) {
    throw ValidationError("noise_model", "volatility", "a must be >= 0");
  }
  return b_t * (1.0 + a * std::fabs(p));
}

enum class SeasonalityMode { Constant, IntradayGaussianBump };

// Either a constant scale b, or b(t) = exp(-d(t, peak)^2 / w^2) + base with
// the distance measured on the circle of one trading session.
struct SeasonalityProfile {
  SeasonalityMode mode = SeasonalityMode::Constant;
  double b = 1.0;               // Constant mode
  double w = 20.0;              // bump width, minutes
  double base = 0.5;            // bump floor
  double peak_offset = 195.0;   // minutes into the session
  double session_length = 390.0;

  static SeasonalityProfile constant(double b) {
    SeasonalityProfile p;
    p.mode = SeasonalityMode::Constant;
    p.b = b;
    return p;
  }

  static SeasonalityProfile intraday_bump(double w, double base,
                                          double peak_offset,
                                          double session_length) {
    SeasonalityProfile p;
    p.mode = SeasonalityMode::IntradayGaussianBump;
    p.w = w;
    p.base = base;
    p.peak_offset = peak_offset;
    p.session_length = session_length;
    return p;
  }
};

inline void validate(const SeasonalityProfile& p) {
  auto fail = [](const std::string& msg) {
    throw ValidationError("noise_model", "validate_seasonality", msg);
  };
  if (p.mode == SeasonalityMode::Constant) {
    if (!(p.b > 0.0)) fail("constant b must be > 0");
    return;
  }
  if (!(p.w > 0.0)) fail("bump width must be > 0");
  if (!(p.base > 0.0)) fail("bump base must be > 0 so that b(t) > 0");
  if (!(p.session_length >= 1.0)) fail("session_length must be >= 1 minute");
  if (!(p.peak_offset >= 0.0 && p.peak_offset < p.session_length)) {
    fail("peak_offset must lie within the session");
  }
}

// Noise scale at minute t of the session cycle (t may exceed one session;
// it is wrapped, and distance to the peak is measured on the circle).
inline double seasonal_b(double t, const SeasonalityProfile& profile) {
  if (profile.mode == SeasonalityMode::Constant) return profile.b;
  const double L = profile.session_length;
  double d = std::fmod(t - profile.peak_offset, L);
  if (d < 0.0) d += L;
  d = std::min(d, L - d);
  return std::exp(-(d * d) / (profile.w * profile.w)) + profile.base;
}

// One return over window T minutes given the instantaneous log-price:
//   Gaussian:   r = b_t (1 + a|p|) sqrt(T) N(0,1)
//   q-Gaussian: r = b_t (1 + a|p|) sigma_q(T) N_q(0,1)
inline double return_increment(double p, const NoiseSpec& spec, double a,
                               double b_t, Rng& rng) {
  const double sigma = volatility(p, a, b_t);
  if (spec.kind == NoiseKind::Gaussian) {
    return sigma * std::sqrt(spec.T) * rng.next_normal();
  }
  return sigma * sigma_q(spec.T, spec.lambda) *
         sample_unit_qgaussian(rng, spec.lambda);
}

}  // namespace herdsim
