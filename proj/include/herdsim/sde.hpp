#pragma once

// Euler-Maruyama integration of the coupled (n_f, xi) herding system with
// state-dependent activity feedback and adaptive stepping. n_f is the
// fundamentalist fraction, xi the average chartist mood; the log-price is
// p = (1 - n_f)/n_f * xi.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/params.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

struct MarketState {
  double t = 0.0;  // physical time, seconds
  double n_f = 0.5;
  double xi = 0.0;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, MarketState state,
                   std::uint64_t step)
      : Error("herding_core", "sde_step",
              message + " (t=" + std::to_string(state.t) +
                  ", n_f=" + std::to_string(state.n_f) +
                  ", xi=" + std::to_string(state.xi) +
                  ", step=" + std::to_string(step) + ")"),
        state(state),
        step(step) {}

  MarketState state;
  std::uint64_t step;
};

namespace detail {

// pow with small integer exponents special-cased; alpha = 2 is the default
// and sits on the hot path.
inline double feedback_pow(double base, double alpha) noexcept {
  if (alpha == 2.0) return base * base;
  if (alpha == 1.0) return base;
  if (alpha == 0.0) return 1.0;
  if (alpha == 3.0) return base * base * base;
  return std::pow(base, alpha);
}

}  // namespace detail

// Log-price p = (1 - n_f)/n_f * xi.
inline double log_price(double n_f, double xi) {
  if (!(n_f > 0.0)) {
    throw Error("herding_core", "log_price", "n_f must be positive");
  }
  return (1.0 - n_f) / n_f * xi;
}

// Trading activity 1/tau = (1 + a|p|)^alpha >= 1.
inline double transaction_rate(double n_f, double xi, double a, double alpha) {
  if (!(n_f > 0.0)) {
    throw Error("herding_core", "transaction_rate", "n_f must be positive");
  }
  const double p = (1.0 - n_f) / n_f * xi;
  return detail::feedback_pow(1.0 + a * std::fabs(p), alpha);
}

// Adaptive step: dt = kappa^2 tau / (h (1 + eps_cf + eps_fc + H(1 + 2 eps_cc))).
inline double adaptive_dt(const MarketState& s, const ModelParams& p) {
  const double rate = transaction_rate(s.n_f, s.xi, p.a, p.alpha);
  const double denom =
      p.h * (1.0 + p.eps_cf + p.eps_fc + p.H * (1.0 + 2.0 * p.eps_cc));
  return p.kappa * p.kappa / (rate * denom);
}

// One Euler-Maruyama step of length dt. The activity 1/tau is evaluated once
// at the pre-step state and shared by both difference equations. Both
// variables are clamped back into their margins afterwards.
inline MarketState sde_step(const MarketState& s, const ModelParams& p,
                            double z1, double z2, double dt) {
  const double rate = transaction_rate(s.n_f, s.xi, p.a, p.alpha);
  const double x = s.n_f;
  const double xi = s.xi;
  const double hdt = p.h * dt;

  double x_next = x + ((1.0 - x) * p.eps_cf * rate - x * p.eps_fc) * hdt +
                  std::sqrt(2.0 * hdt * x * (1.0 - x) * rate) * z1;
  double xi_next = xi - 2.0 * p.H * p.eps_cc * rate * xi * hdt +
                   std::sqrt(2.0 * hdt * p.H * (1.0 - xi * xi) * rate) * z2;

  if (!std::isfinite(x_next) || !std::isfinite(xi_next)) {
    throw IntegrationError("non-finite state update", s, 0);
  }

  x_next = std::min(std::max(x_next, p.delta), 1.0 - p.delta);
  xi_next = std::min(std::max(xi_next, -1.0 + p.delta), 1.0 - p.delta);
  return MarketState{s.t + dt, x_next, xi_next};
}

// Draws an initial state from the feedback-free stationary laws:
// n_f ~ Beta(eps_cf, eps_fc) and (1 + xi)/2 ~ Beta(eps_cc, eps_cc).
inline MarketState stationary_initial_state(const ModelParams& p, Rng& rng) {
  MarketState s;
  s.t = 0.0;
  s.n_f = std::min(std::max(rng.next_beta(p.eps_cf, p.eps_fc), p.delta),
                   1.0 - p.delta);
  s.xi = std::min(
      std::max(2.0 * rng.next_beta(p.eps_cc, p.eps_cc) - 1.0, -1.0 + p.delta),
      1.0 - p.delta);
  return s;
}

// Log-price path sampled on a fixed one-minute grid.
struct PricePath {
  struct Sample {
    double n_f;
    double xi;
    double p;
  };
  double dt_grid = 60.0;  // seconds
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  ModelParams params;
};

// Integrates for burn_in + duration minutes, capping each step at the next
// grid boundary so samples land on exact grid times, and records one sample
// per minute once burn-in has elapsed. Deterministic given (seed, stream).
inline PricePath simulate_path(const ModelParams& params,
                               std::int64_t duration_min,
                               std::int64_t burn_in_min, std::uint64_t seed,
                               std::uint64_t stream = 0,
                               std::uint64_t max_steps = 2'000'000'000ull) {
  validate(params);
  if (duration_min < 1) {
    throw ValidationError("herding_core", "simulate_path",
                          "duration must be >= 1 minute");
  }
  if (burn_in_min < 0) {
    throw ValidationError("herding_core", "simulate_path",
                          "burn_in must be >= 0");
  }

  Rng rng(seed, stream);
  MarketState s = stationary_initial_state(params, rng);

  PricePath path;
  path.seed = seed;
  path.stream = stream;
  path.params = params;
  path.samples.reserve(static_cast<std::size_t>(duration_min));

  const std::int64_t total_min = burn_in_min + duration_min;
  std::uint64_t steps = 0;
  for (std::int64_t minute = 0; minute < total_min; ++minute) {
    if (minute >= burn_in_min) {
      path.samples.push_back(
          PricePath::Sample{s.n_f, s.xi, log_price(s.n_f, s.xi)});
    }
    const double grid_t = static_cast<double>(minute + 1) * 60.0;
    while (s.t < grid_t) {
      const double dt = std::min(adaptive_dt(s, params), grid_t - s.t);
      try {
        s = sde_step(s, params, rng.next_normal(), rng.next_normal(), dt);
      } catch (const IntegrationError& e) {
        throw IntegrationError("non-finite state update", e.state, steps);
      }
      if (++steps > max_steps) {
        throw IntegrationError("step budget exceeded", s, steps);
      }
    }
    s.t = grid_t;  // absorb accumulated rounding at the grid point
  }
  return path;
}

}  // namespace herdsim
