#include "flowregime/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace flowregime {

SyntheticOutput simulate(const SyntheticSpec& spec) {
  spec.validate();

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const double sd0 = std::sqrt(spec.sigma0_sq);
  const double sd = std::sqrt(spec.sigma_sq);
  const double rho_start =
      spec.rho_start.value_or(spec.beta != 1.0 ? spec.omega / (1.0 - spec.beta) : 0.0);
  const bool score_driven = spec.rho_mode == SyntheticSpec::RhoMode::ScoreDriven;

  SyntheticOutput out;
  const std::size_t t_count = static_cast<std::size_t>(spec.length);
  out.x.reserve(t_count);
  out.regime_index.reserve(t_count);
  if (score_driven) out.true_rho.reserve(t_count);

  double theta = 0.0;
  double rho = 0.0;
  double x_prev = 0.0;
  std::int64_t regime = -1;
  std::size_t within = 0;

  for (std::size_t t = 0; t < t_count; ++t) {
    const bool new_regime = t == 0 || uniform(rng) < spec.hazard_prob;
    if (new_regime) {
      theta = spec.mu0 + sd0 * unit_normal(rng);
      rho = score_driven ? std::clamp(rho_start, -1.0, 1.0) : spec.rho;
      within = 0;
      ++regime;
      out.true_means.push_back(theta);
      if (t > 0) out.true_cp_times.push_back(static_cast<std::int64_t>(t) + 1);
    }

    double x;
    if (within == 0) {
      x = theta + sd * unit_normal(rng);
    } else if (!score_driven) {
      const double innov_sd = sd * std::sqrt(1.0 - spec.rho * spec.rho);
      x = theta + spec.rho * (x_prev - theta) + innov_sd * unit_normal(rng);
    } else {
      const double u = sd * unit_normal(rng);
      x = theta + rho * (x_prev - theta) + u;
    }

    out.x.push_back(x);
    out.regime_index.push_back(regime);
    if (score_driven) {
      out.true_rho.push_back(rho);
      // observation-driven update for the next in-regime draw
      const double u = x - theta - (within == 0 ? 0.0 : rho * (x_prev - theta));
      const double s = u / spec.sigma_sq * (within == 0 ? 0.0 : (x_prev - theta));
      rho = std::clamp(spec.omega + spec.alpha * s + spec.beta * rho, -1.0, 1.0);
    }
    x_prev = x;
    ++within;
  }
  return out;
}

}  // namespace flowregime
