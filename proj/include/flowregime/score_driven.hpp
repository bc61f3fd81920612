#pragma once

#include <span>
#include <vector>

#include "flowregime/errors.hpp"

namespace flowregime {

// Parameters of the score-driven AR(1) correlation recursion:
//   rho_{t+1} = omega + alpha * s_t + beta * rho_t,  s_t = (u_t / sigma_sq) * x_{t-1}
// on a demeaned window; sigma_sq is the innovation variance.
struct ScoreDrivenParams {
  double omega = 0.08;
  double alpha = 0.02;
  double beta = 0.05;
  double sigma_sq = 1e8;
};

struct FilterPath {
  std::vector<double> rho;     // one value per window observation
  std::vector<double> errors;  // u_t, one per transition
  std::vector<double> scores;  // s_t, one per transition
  // Recursion advanced one step past the window: the coefficient that
  // multiplies the last observation when predicting the next one.
  double rho_next = 0.0;
  double log_likelihood = 0.0;
  std::size_t clamp_hits = 0;
};

// Unscaled score of the Gaussian one-step log-likelihood w.r.t. rho_t.
inline double score(double u_t, double x_prev_centered, double sigma_sq) {
  if (sigma_sq <= 0.0) throw ConfigError("score: sigma_sq must be positive");
  return u_t / sigma_sq * x_prev_centered;
}

// Forward recursion over a demeaned window (length >= 2). rho is clamped to
// [-1, 1]; the conditional likelihood starts at the second observation.
FilterPath sd_filter(std::span<const double> x_centered, const ScoreDrivenParams& params,
                     double rho_init);

struct EstimateOptions {
  int max_evals = 500;
  double spread_tol = 1e-8;
  double initial_step = 0.1;
};

// Maximum-likelihood fit of the recursion parameters on a demeaned window,
// via derivative-free search on transformed coordinates (log sigma_sq,
// atanh beta). Never returns a point with lower likelihood than the start.
ScoreDrivenParams sd_estimate(std::span<const double> x_centered,
                              const ScoreDrivenParams& init, double rho_init,
                              const EstimateOptions& opts = {}, bool* converged = nullptr);

}  // namespace flowregime
