#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "herdsim/errors.hpp"

namespace herdsim {

// Model constants. Epsilons are the herding-rate ratios eps_cf = sigma_cf/h,
// eps_fc = sigma_fc/h, eps_cc = sigma_cc/(H h); h is in 1/seconds and sets
// the only physical time scale. Defaults reproduce the reference experiment.
struct ModelParams {
  double eps_cf = 0.1;   // fundamentalist gain rate ratio
  double eps_fc = 3.0;   // fundamentalist loss rate ratio
  double eps_cc = 3.0;   // chartist mood spontaneous-flip ratio
  double H = 300.0;      // chartist-chartist vs chartist-fundamentalist speed
  double h = 1e-8;       // herding rate, 1/s
  double a = 0.5;        // endogenous-noise weight in volatility and activity
  double b = 1.0;        // exogenous-noise scale
  double alpha = 2.0;    // activity feedback exponent
  double lambda = 4.0;   // tail exponent of exogenous q-Gaussian noise
  double kappa = 0.03;   // integrator precision factor
  double delta = 1e-6;   // boundary margin for n_f and xi
};

// Validates admissible ranges. Returns warnings (currently only for
// 2 < lambda <= 3, where the q-Gaussian leaves the usual validity region);
// throws ValidationError on a hard violation.
inline std::vector<std::string> validate(const ModelParams& p) {
  auto fail = [](const std::string& msg) {
    throw ValidationError("herding_core", "validate_params", msg);
  };
  if (!(p.eps_cf > 0.0)) fail("eps_cf must be > 0");
  if (!(p.eps_fc > 0.0)) fail("eps_fc must be > 0");
  if (!(p.eps_cc > 0.0)) fail("eps_cc must be > 0");
  if (!(p.H >= 1.0)) fail("H must be >= 1");
  if (!(p.h > 0.0)) fail("h must be > 0");
  if (!(p.a >= 0.0)) fail("a must be >= 0");
  if (!(p.b > 0.0)) fail("b must be > 0");
  if (!(p.alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(p.kappa > 0.0)) fail("kappa must be > 0");
  if (!(p.delta > 0.0 && p.delta < 0.5)) fail("delta must be in (0, 0.5)");
  if (!(p.lambda > 2.0)) {
    fail("lambda must be > 2 (q = 1 + 2/lambda would have no finite scale)");
  }
  std::vector<std::string> warnings;
  if (p.lambda <= 3.0) {
    warnings.push_back(
        "lambda <= 3: q = 1 + 2/lambda lies outside 1 < q < 5/3; "
        "q-Gaussian results are outside the usual validity region");
  }
  return warnings;
}

}  // namespace herdsim
