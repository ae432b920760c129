#pragma once

// Discrete N-agent herding system simulated as an exact continuous-time
// Markov chain (next-event sampling). Serves as an independent microscopic
// oracle for the SDE limit; it is not part of the production pipeline.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

struct AgentCounts {
  std::int64_t total = 0;
  std::int64_t fundamentalists = 0;
  std::int64_t optimists = 0;
  std::int64_t pessimists = 0;
};

// Unscaled transition rates: sigma_* are spontaneous switching rates, h the
// fundamentalist<->chartist herding rate, Hh the optimist<->pessimist one.
struct HerdingRates {
  double sigma_cf = 1e-9;  // chartist -> fundamentalist, spontaneous
  double sigma_fc = 3e-8;  // fundamentalist -> chartist, spontaneous
  double sigma_cc = 9e-6;  // optimist <-> pessimist, spontaneous
  double h = 1e-8;
  double H = 300.0;
};

// Event intensities per unit time for the six one-agent transitions, with
// n_i = N_i/N. Built from the one-step rates of the Kirman form, split over
// the two chartist destinations with the symmetry assumptions
// sigma_fo = sigma_fp = sigma_fc/2 and h_op = h_po = H h:
//   [0] f->o : N n_f (sigma_fc/(2N) + h n_o)   [1] f->p : same with n_p
//   [2] o->f : N n_o (sigma_cf/N + h n_f)      [3] p->f : symmetric
//   [4] p->o : N n_p (sigma_cc/N + H h n_o)    [5] o->p : symmetric
inline std::array<double, 6> agent_transition_rates(const AgentCounts& c,
                                                    const HerdingRates& r) {
  const double n = static_cast<double>(c.total);
  const double f = static_cast<double>(c.fundamentalists);
  const double o = static_cast<double>(c.optimists);
  const double p = static_cast<double>(c.pessimists);
  const double hh = r.H * r.h;
  return {f * (0.5 * r.sigma_fc + r.h * o) / n,
          f * (0.5 * r.sigma_fc + r.h * p) / n,
          o * (r.sigma_cf + r.h * f) / n,
          p * (r.sigma_cf + r.h * f) / n,
          p * (r.sigma_cc + hh * o) / n,
          o * (r.sigma_cc + hh * p) / n};
}

// Simulates the three-state chain for duration seconds after burn_in seconds
// and returns the occupancy sampled every sample_every seconds.
inline std::vector<AgentCounts> agent_oracle(std::int64_t N,
                                             const HerdingRates& rates,
                                             double duration_s,
                                             double sample_every_s,
                                             double burn_in_s,
                                             std::uint64_t seed,
                                             std::uint64_t stream = 0) {
  auto fail = [](const std::string& msg) {
    throw ValidationError("herding_core", "agent_oracle", msg);
  };
  if (N < 3) fail("need at least 3 agents");
  if (N > 1'000'000'000) fail("agent count too large, rates would overflow");
  if (!(rates.sigma_cf > 0.0 && rates.sigma_fc > 0.0 && rates.sigma_cc > 0.0 &&
        rates.h > 0.0 && rates.H >= 1.0)) {
    fail("all rates must be positive and H >= 1");
  }
  if (!(duration_s > 0.0) || !(sample_every_s > 0.0) || burn_in_s < 0.0) {
    fail("invalid time arguments");
  }

  Rng rng(seed, stream);
  AgentCounts counts{N, N / 3, N / 3, N - N / 3 - N / 3};

  std::vector<AgentCounts> out;
  out.reserve(static_cast<std::size_t>(duration_s / sample_every_s) + 1);

  double t = 0.0;
  const double t_end = burn_in_s + duration_s;
  double next_sample = burn_in_s;

  while (t < t_end) {
    const auto w = agent_transition_rates(counts, rates);
    double total = 0.0;
    for (double v : w) total += v;
    if (!std::isfinite(total)) fail("total transition rate overflowed");
    if (total <= 0.0) break;  // unreachable while spontaneous rates > 0

    const double t_event = t + rng.next_exponential() / total;
    while (next_sample < t_event && next_sample <= t_end) {
      out.push_back(counts);
      next_sample += sample_every_s;
    }
    if (t_event >= t_end) break;
    t = t_event;

    double pick = rng.next_double() * total;
    int channel = 0;
    for (; channel < 5; ++channel) {
      pick -= w[static_cast<std::size_t>(channel)];
      if (pick < 0.0) break;
    }
    switch (channel) {
      case 0: --counts.fundamentalists; ++counts.optimists; break;
      case 1: --counts.fundamentalists; ++counts.pessimists; break;
      case 2: --counts.optimists; ++counts.fundamentalists; break;
      case 3: --counts.pessimists; ++counts.fundamentalists; break;
      case 4: --counts.pessimists; ++counts.optimists; break;
      case 5: --counts.optimists; ++counts.pessimists; break;
    }
  }
  return out;
}

}  // namespace herdsim
